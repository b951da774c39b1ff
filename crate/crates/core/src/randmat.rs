//! Random-matrix ensembles, a singular-value kernel, and the
//! invertibility experiments: smallest/largest singular value tails,
//! exact and Monte Carlo singularity of discrete matrices, the
//! distance-to-hyperplane identity, the random normal's LCD, and
//! rectangular smallest singular values.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::lcd::{essential_lcd, LcdOutcome, LcdParams};
use crate::rng::{substream_rng, substream_seed};
use crate::stats::{mean, quantile_sorted, wilson_interval};
use crate::vectors::{
    classify_compressible, spread_part, CoefficientVector, Compressibility,
    CompressibilityParams,
};

/// Default enumeration budget for exact singularity probabilities:
/// covers 2^(n^2) sign matrices up to n = 3; larger sizes need an
/// explicit budget from the caller.
pub const DEFAULT_MATRIX_BUDGET: u64 = 4096;

/// Default relative accuracy of the singular-value kernel.
pub const DEFAULT_SVD_TOL: f64 = 1e-10;

/// Substream labels used to derive per-trial seeds; exposed so reports
/// can echo the seed that reproduces each trial.
pub mod labels {
    pub const TAIL_TRIAL: &str = "tail-trial";
    pub const LARGEST_TRIAL: &str = "largest-trial";
    pub const SINGULARITY_TRIAL: &str = "singularity-trial";
    pub const DISTANCE_TRIAL: &str = "distance-trial";
    pub const NORMAL_LCD_TRIAL: &str = "normal-lcd-trial";
    pub const RECT_TRIAL: &str = "rect-trial";
}

/// An i.i.d.-entry matrix ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub rows: usize,
    pub cols: usize,
    pub entry: DistributionSpec,
}

impl Ensemble {
    pub fn square(n: usize, entry: DistributionSpec) -> Result<Self> {
        Self::new(n, n, entry)
    }

    pub fn new(rows: usize, cols: usize, entry: DistributionSpec) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be at least 1"));
        }
        entry.require_exchangeable()?;
        Ok(Self { rows, cols, entry })
    }
}

/// Samples a rows x cols matrix with i.i.d. entries, drawn row-major
/// from the substream ("matrix", seed). Deterministic per (ensemble, seed).
pub fn sample_matrix(e: &Ensemble, seed: u64) -> DMatrix<f64> {
    let mut rng = substream_rng(seed, "matrix", 0);
    let mut data = Vec::with_capacity(e.rows * e.cols);
    for idx in 0..e.rows * e.cols {
        data.push(e.entry.sample_at(&mut rng, idx));
    }
    DMatrix::from_row_slice(e.rows, e.cols, &data)
}

/// Non-increasing singular values with a backward-error diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    residual: f64,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Relative Frobenius backward error of the decomposition.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Full singular spectrum by nalgebra's bidiagonalization-based SVD,
/// sorted non-increasing, with the reconstruction residual
/// ||U S V^T - A||_F / ||A||_F reported as the convergence diagnostic.
pub fn singular_values(a: &DMatrix<f64>, tol: f64) -> Result<SingularSpectrum> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let svd = a
        .clone()
        .try_svd(true, true, tol, 100_000)
        .ok_or_else(|| Error::precondition("SVD iteration did not converge"))?;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let recon = u * DMatrix::from_diagonal(&svd.singular_values) * v_t;
    let denom = a.norm();
    let residual = if denom == 0.0 {
        (&recon - a).norm()
    } else {
        (&recon - a).norm() / denom
    };
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_unstable_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(SingularSpectrum { values, residual })
}

/// Smallest singular value only (no residual bookkeeping); used inside
/// the Monte Carlo loops.
fn smin_of(a: DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    sv.iter().copied().fold(f64::INFINITY, f64::min)
}

fn smax_of(a: DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    sv.iter().copied().fold(0.0, f64::max)
}

/// Empirical tail of the scaled smallest singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    /// Ascending threshold grid.
    pub eps_grid: Vec<f64>,
    /// Per-threshold number of trials with s_min <= eps * n^{-1/2}.
    pub counts: Vec<u64>,
    pub trials: u64,
    /// 95% Wilson intervals per threshold.
    pub wilson_bands: Vec<(f64, f64)>,
    /// Per-trial s_min * n^{1/2} (the quantity compared against eps).
    pub smin_scaled: Vec<f64>,
}

impl TailEstimate {
    pub fn fraction(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.trials as f64
    }
}

/// Monte Carlo tail P(s_min(A) <= eps n^{-1/2}) for square matrices.
pub fn smallest_singular_tail(
    n: usize,
    entry: &DistributionSpec,
    eps_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    if trials < 100 {
        return Err(Error::invalid(format!("need at least 100 trials, got {trials}")));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| e.is_nan() || *e < 0.0) {
        return Err(Error::invalid("eps grid must be non-empty and non-negative"));
    }
    let ensemble = Ensemble::square(n, entry.clone())?;
    let scale = (n as f64).sqrt();
    let smin_scaled: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let m = sample_matrix(&ensemble, substream_seed(seed, labels::TAIL_TRIAL, trial));
            smin_of(m) * scale
        })
        .collect();
    let mut grid = eps_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let counts: Vec<u64> = grid
        .iter()
        .map(|&e| smin_scaled.iter().filter(|&&s| s <= e).count() as u64)
        .collect();
    let wilson_bands = counts.iter().map(|&c| wilson_interval(c, trials)).collect();
    Ok(TailEstimate {
        eps_grid: grid,
        counts,
        trials,
        wilson_bands,
        smin_scaled,
    })
}

/// Summary of s_1 / sqrt(n) over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct LargestSingularStats {
    /// Per-trial s_1 / sqrt(n), in trial order.
    pub scaled: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

pub fn largest_singular_stats(
    n: usize,
    entry: &DistributionSpec,
    trials: u64,
    seed: u64,
) -> Result<LargestSingularStats> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if entry.fourth_moment_bound().is_none() {
        return Err(Error::precondition(
            "largest-singular-value statistics need finite fourth-moment metadata",
        ));
    }
    let ensemble = Ensemble::square(n, entry.clone())?;
    let scale = (n as f64).sqrt();
    let scaled: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let m = sample_matrix(&ensemble, substream_seed(seed, labels::LARGEST_TRIAL, trial));
            smax_of(m) / scale
        })
        .collect();
    let mut sorted = scaled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(LargestSingularStats {
        mean: mean(&scaled),
        median: quantile_sorted(&sorted, 0.5),
        q05: quantile_sorted(&sorted, 0.05),
        q95: quantile_sorted(&sorted, 0.95),
        scaled,
    })
}

/// Exact integer representation of a finite support: atom values scaled
/// by a common power of two, with exact rational probabilities.
struct IntegerSupport {
    scaled_values: Vec<BigInt>,
    probs: Vec<BigRational>,
    cumulative: Vec<f64>,
}

fn integer_support(entry: &DistributionSpec) -> Result<IntegerSupport> {
    entry.require_exchangeable()?;
    let atoms = entry.finite_support_at(0)?;
    let mut rationals = Vec::with_capacity(atoms.len());
    for a in &atoms {
        let r = BigRational::from_float(a.value).ok_or_else(|| {
            Error::invalid(format!("atom value {} is not finite", a.value))
        })?;
        rationals.push(r);
    }
    // Every f64 is a dyadic rational; the common denominator is the max.
    let denom = rationals
        .iter()
        .map(|r| r.denom().clone())
        .max()
        .unwrap_or_else(BigInt::one);
    if denom.bits() > 128 {
        return Err(Error::invalid(
            "atom values need more than 128 fractional bits; not exactly representable \
             at a reasonable scale",
        ));
    }
    let scaled_values: Vec<BigInt> = rationals
        .iter()
        .map(|r| (r * &denom).to_integer())
        .collect();
    let mut probs = Vec::with_capacity(atoms.len());
    let mut cumulative = Vec::with_capacity(atoms.len());
    let mut cum = 0.0;
    for a in &atoms {
        probs.push(
            BigRational::from_float(a.prob)
                .ok_or_else(|| Error::invalid("atom probability is not finite"))?,
        );
        cum += a.prob;
        cumulative.push(cum);
    }
    Ok(IntegerSupport {
        scaled_values,
        probs,
        cumulative,
    })
}

/// Fraction-free (Bareiss) determinant over exact integers.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // division is exact (Bareiss identity)
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Exact singularity probability by complete enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSingularity {
    pub probability: BigRational,
    pub singular_count: u64,
    pub total_count: u64,
}

impl ExactSingularity {
    pub fn as_f64(&self) -> f64 {
        // Numerator/denominator may exceed f64 range in principle; go
        // through a 64-bit count ratio when possible.
        let num = self.probability.numer();
        let den = self.probability.denom();
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => n as f64 / d as f64,
            _ => self.singular_count as f64 / self.total_count as f64,
        }
    }
}

/// Enumerates every matrix over the finite support and counts exact
/// zero determinants via fraction-free elimination. The probability is
/// exact with respect to the stored atom probabilities.
pub fn exact_singularity_probability(
    n: usize,
    entry: &DistributionSpec,
    budget: u64,
) -> Result<ExactSingularity> {
    if n == 0 {
        return Err(Error::invalid("matrix size must be at least 1"));
    }
    let support = integer_support(entry)?;
    let s = support.scaled_values.len();
    let cells = n * n;
    let total = (s as f64).powi(cells as i32);
    if total > budget as f64 {
        return Err(Error::capacity(format!(
            "{s}^{cells} matrices exceed the enumeration budget of {budget}; \
             raise the budget explicitly or use monte_carlo_singularity"
        )));
    }
    let total = total as u64;

    let mut assignment = vec![0usize; cells];
    let mut singular_count = 0u64;
    let mut probability = BigRational::zero();
    for _ in 0..total {
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| support.scaled_values[assignment[i * n + j]].clone())
                    .collect()
            })
            .collect();
        if bareiss_det(m).is_zero() {
            singular_count += 1;
            let p = assignment
                .iter()
                .fold(BigRational::one(), |acc, &idx| acc * &support.probs[idx]);
            probability += p;
        }
        // Mixed-radix odometer.
        for digit in assignment.iter_mut() {
            *digit += 1;
            if *digit < s {
                break;
            }
            *digit = 0;
        }
    }
    Ok(ExactSingularity {
        probability,
        singular_count,
        total_count: total,
    })
}

/// Monte Carlo singularity estimate with exact zero-determinant tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityEstimate {
    pub trials: u64,
    pub singular_count: u64,
    pub fraction: f64,
    pub wilson: (f64, f64),
    /// Per-trial singularity flags, in trial order.
    pub per_trial: Vec<bool>,
}

pub fn monte_carlo_singularity(
    n: usize,
    entry: &DistributionSpec,
    trials: u64,
    seed: u64,
) -> Result<SingularityEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::invalid("need n >= 1 and trials >= 1"));
    }
    let support = integer_support(entry)?;
    let per_trial: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream_rng(seed, labels::SINGULARITY_TRIAL, trial);
            let m: Vec<Vec<BigInt>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let u = crate::rng::next_uniform(&mut rng);
                            let idx = support
                                .cumulative
                                .iter()
                                .position(|&c| u < c)
                                .unwrap_or(support.cumulative.len() - 1);
                            support.scaled_values[idx].clone()
                        })
                        .collect()
                })
                .collect();
            bareiss_det(m).is_zero()
        })
        .collect();
    let singular_count = per_trial.iter().filter(|s| **s).count() as u64;
    Ok(SingularityEstimate {
        trials,
        singular_count,
        fraction: singular_count as f64 / trials as f64,
        wilson: wilson_interval(singular_count, trials),
        per_trial,
    })
}

/// A unit vector orthogonal to the given columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomNormal {
    pub vector: DVector<f64>,
    /// True when the columns were rank deficient (nullspace dimension
    /// above 1), in which case the normal is one valid choice among many.
    pub degenerate: bool,
}

/// Unit normal of the span of `columns` (an n x (n-1) matrix) via
/// Householder QR: the last column of the full Q is orthogonal to the
/// column span regardless of rank. The sign is fixed so that the first
/// coordinate of largest magnitude is positive.
pub fn random_normal(columns: &DMatrix<f64>) -> Result<RandomNormal> {
    let n = columns.nrows();
    let m = columns.ncols();
    if n < 2 || m != n - 1 {
        return Err(Error::invalid(format!(
            "need n x (n-1) columns, got {n} x {m}"
        )));
    }
    let mut a = columns.clone();
    let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(m);
    let mut r_diag = Vec::with_capacity(m);
    for j in 0..m {
        let len = n - j;
        let mut v = DVector::zeros(len);
        for i in 0..len {
            v[i] = a[(j + i, j)];
        }
        let norm = v.norm();
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        r_diag.push(alpha);
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm > 0.0 {
            v /= vnorm;
            for col in j..m {
                let mut dot = 0.0;
                for i in 0..len {
                    dot += v[i] * a[(j + i, col)];
                }
                for i in 0..len {
                    a[(j + i, col)] -= 2.0 * dot * v[i];
                }
            }
        }
        reflectors.push(v);
    }
    // Rank detection on the R diagonal.
    let max_diag = r_diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let rank_tol = max_diag * (n as f64) * f64::EPSILON;
    let degenerate = r_diag.iter().any(|d| d.abs() <= rank_tol);

    // X* = Q e_n = H_0 H_1 ... H_{m-1} e_n.
    let mut x = DVector::zeros(n);
    x[n - 1] = 1.0;
    for j in (0..m).rev() {
        let v = &reflectors[j];
        if v.norm_squared() == 0.0 {
            continue;
        }
        let len = n - j;
        let mut dot = 0.0;
        for i in 0..len {
            dot += v[i] * x[j + i];
        }
        for i in 0..len {
            x[j + i] -= 2.0 * dot * v[i];
        }
    }
    x /= x.norm();
    // Sign convention.
    let mut best = 0usize;
    for i in 1..n {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    if x[best] < 0.0 {
        x = -x;
    }
    Ok(RandomNormal { vector: x, degenerate })
}

/// One trial of the distance-vs-inner-product comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceTrial {
    /// dist(X_n, H_n) by SVD least-squares projection residual.
    pub dist: f64,
    /// |<X*, X_n>| through the Householder normal.
    pub inner: f64,
    /// |dist - inner| / max(dist, 1e-300).
    pub rel_discrepancy: f64,
    pub degenerate: bool,
}

/// Samples n x n matrices and compares the distance from the last column
/// to the span of the others against the normal inner product. The two
/// routes are algebraically equal in the codimension-1 case and are
/// computed by independent kernels.
pub fn distance_experiment(
    n: usize,
    entry: &DistributionSpec,
    trials: u64,
    seed: u64,
) -> Result<Vec<DistanceTrial>> {
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let ensemble = Ensemble::square(n, entry.clone())?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let a = sample_matrix(&ensemble, substream_seed(seed, labels::DISTANCE_TRIAL, trial));
            let span = a.columns(0, n - 1).into_owned();
            let xn = a.column(n - 1).into_owned();
            let normal = random_normal(&span)?;
            let inner = normal.vector.dot(&xn).abs();
            let svd = span
                .clone()
                .try_svd(true, true, 1e-13, 100_000)
                .ok_or_else(|| Error::precondition("SVD iteration did not converge"))?;
            let coeffs = svd
                .solve(&xn, 1e-13)
                .map_err(|e| Error::precondition(format!("least-squares solve failed: {e}")))?;
            let dist = (&span * coeffs - &xn).norm();
            let rel = (dist - inner).abs() / dist.max(1e-300);
            Ok(DistanceTrial {
                dist,
                inner,
                rel_discrepancy: rel,
                degenerate: normal.degenerate,
            })
        })
        .collect()
}

/// Per-trial outcome of the random-normal LCD experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcdTrialStatus {
    /// Empty spread part; by convention D = 0.
    NotDefined,
    Found,
    /// D exceeds the horizon (the expected outcome for generic normals).
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLcdTrial {
    pub spread_size: usize,
    pub status: LcdTrialStatus,
    /// D with NotFound censored at t_max and NotDefined mapped to 0.
    pub d_censored: f64,
    pub compressible: bool,
}

/// Report of the random-normal LCD experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalLcdReport {
    pub trials: Vec<NormalLcdTrial>,
    pub not_defined: u64,
    pub not_found: u64,
    pub compressible_count: u64,
    /// Quantiles of the censored D values: (q25, median, q75).
    pub d_quantiles: (f64, f64, f64),
}

/// Compressibility parameters used to classify the random normal.
pub const NORMAL_COMP_DELTA: f64 = 0.1;
pub const NORMAL_COMP_RHO: f64 = 0.1;

/// For each trial: sample n-1 random columns, take the unit normal,
/// extract its spread part between the levels (K1, K2), and run the
/// essential-LCD search with budget kappa = beta * n up to t_max.
#[allow(clippy::too_many_arguments)]
pub fn normal_lcd_experiment(
    n: usize,
    entry: &DistributionSpec,
    k1: f64,
    k2: f64,
    alpha: f64,
    beta: f64,
    trials: u64,
    seed: u64,
    t_max: f64,
) -> Result<NormalLcdReport> {
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::invalid(format!("beta must be in (0, 1/2), got {beta}")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let ensemble = Ensemble::new(n, n - 1, entry.clone())?;
    let comp_params = CompressibilityParams::new(NORMAL_COMP_DELTA, NORMAL_COMP_RHO)?;
    let kappa = beta * n as f64;
    let lcd_params = LcdParams::new(alpha, kappa, t_max)?;
    let per_trial: Vec<NormalLcdTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let cols = sample_matrix(&ensemble, substream_seed(seed, labels::NORMAL_LCD_TRIAL, trial));
            let normal = random_normal(&cols)?;
            let x = CoefficientVector::new(normal.vector.iter().copied().collect())?;
            let compressible =
                classify_compressible(&x, &comp_params)? == Compressibility::Compressible;
            let (spread_size, status, d_censored) = match spread_part(&x, k1, k2)? {
                None => (0, LcdTrialStatus::NotDefined, 0.0),
                Some(sp) => {
                    let v = sp.to_vector()?;
                    match essential_lcd(&v, &lcd_params)? {
                        LcdOutcome::Found(d) => (v.len(), LcdTrialStatus::Found, d),
                        LcdOutcome::NotFound => (v.len(), LcdTrialStatus::NotFound, t_max),
                    }
                }
            };
            Ok(NormalLcdTrial {
                spread_size,
                status,
                d_censored,
                compressible,
            })
        })
        .collect::<Result<_>>()?;

    let not_defined = per_trial
        .iter()
        .filter(|t| t.status == LcdTrialStatus::NotDefined)
        .count() as u64;
    let not_found = per_trial
        .iter()
        .filter(|t| t.status == LcdTrialStatus::NotFound)
        .count() as u64;
    let compressible_count = per_trial.iter().filter(|t| t.compressible).count() as u64;
    let mut ds: Vec<f64> = per_trial.iter().map(|t| t.d_censored).collect();
    ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d_quantiles = (
        quantile_sorted(&ds, 0.25),
        quantile_sorted(&ds, 0.5),
        quantile_sorted(&ds, 0.75),
    );
    Ok(NormalLcdReport {
        trials: per_trial,
        not_defined,
        not_found,
        compressible_count,
        d_quantiles,
    })
}

/// Distribution summary of s_min(G)/sqrt(n) for n x k samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangularReport {
    /// Per-trial s_min / sqrt(n), in trial order.
    pub smin_scaled: Vec<f64>,
    pub p01: f64,
    pub p05: f64,
    pub median: f64,
}

pub fn rectangular_smin_experiment(
    n: usize,
    k: usize,
    entry: &DistributionSpec,
    trials: u64,
    seed: u64,
) -> Result<RectangularReport> {
    if k >= n {
        return Err(Error::invalid(format!(
            "aspect ratio requires k < n, got k = {k}, n = {n}"
        )));
    }
    if k == 0 || trials == 0 {
        return Err(Error::invalid("need k >= 1 and trials >= 1"));
    }
    let ensemble = Ensemble::new(n, k, entry.clone())?;
    let scale = (n as f64).sqrt();
    let smin_scaled: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let m = sample_matrix(&ensemble, substream_seed(seed, labels::RECT_TRIAL, trial));
            smin_of(m) / scale
        })
        .collect();
    let mut sorted = smin_scaled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(RectangularReport {
        p01: quantile_sorted(&sorted, 0.01),
        p05: quantile_sorted(&sorted, 0.05),
        median: quantile_sorted(&sorted, 0.5),
        smin_scaled,
    })
}
