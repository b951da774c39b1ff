//! Small-ball probability engines and bounds: exact enumeration for
//! finite-support steps, seeded Monte Carlo, the Berry-Esseen/CLT bound,
//! the characteristic-function integral, the sine-sum functional with
//! its level sets, and the main anti-concentration bound evaluator.

use rayon::prelude::*;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::lcd::{essential_lcd, LcdParams};
use crate::rng::substream_rng;
use crate::stats::dkw_band;
use crate::vectors::CoefficientVector;

/// Default cap on the number of enumerated outcome atoms.
pub const DEFAULT_ATOM_BUDGET: u64 = 1 << 26;

/// Default panel count for the characteristic-function quadrature.
pub const DEFAULT_QUAD_PANELS: u32 = 4096;

/// Relative tolerance admitting atoms on the closed window boundary that
/// floating-point rounding pushed out by a few ulps.
const WINDOW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Exact,
    MonteCarlo,
}

/// p_eps(a) = sup_v P(|S - v| <= eps) together with the maximizing center.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBallEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    /// A center v achieving the supremum (exact) or the sample maximum.
    pub v_star: f64,
    /// 0 for exact values; the 95% DKW band for Monte Carlo.
    pub error_band: f64,
    pub sample_count: Option<u64>,
}

/// A named bound evaluation with its inputs echoed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_name: &'static str,
    pub value: f64,
    pub inputs: Vec<(&'static str, f64)>,
    /// Ratio estimate/bound when a reference estimate is attached.
    pub comparison: Option<f64>,
    /// A-posteriori quadrature refinement error, when applicable.
    pub error_estimate: Option<f64>,
    pub note: Option<String>,
}

impl BoundReport {
    pub fn with_comparison(mut self, estimate: f64) -> Self {
        self.comparison = Some(estimate / self.value);
        self
    }
}

fn sorted_atoms(a: &CoefficientVector, dist: &DistributionSpec, budget: u64) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    let support = dist.support_size().ok_or_else(|| {
        Error::capability(
            "exact enumeration needs a finite-support distribution; use monte_carlo_small_ball",
        )
    })?;
    // Raw outcome count s^n against the budget, computed in logs to
    // avoid overflow.
    let log_atoms = (n as f64) * (support as f64).ln();
    if log_atoms > (budget as f64).ln() * (1.0 + 1e-12) {
        return Err(Error::capacity(format!(
            "{support}^{n} outcome atoms exceed the budget of {budget}; \
             use monte_carlo_small_ball"
        )));
    }

    let mut atoms: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for (k, &coeff) in a.values().iter().enumerate() {
        let support_k = dist.finite_support_at(k)?;
        let mut next = Vec::with_capacity(atoms.len() * support_k.len());
        for &(s, p) in &atoms {
            for at in &support_k {
                next.push((s + coeff * at.value, p * at.prob));
            }
        }
        next.sort_unstable_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
        for (v, p) in next {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        atoms = merged;
    }
    Ok(atoms)
}

/// Maximum probability mass in a closed window of width 2*eps over a
/// sorted atom list. The optimal center always places an atom on the
/// left window edge, so anchoring windows at atoms is exhaustive.
fn window_max(atoms: &[(f64, f64)], eps: f64) -> (f64, f64) {
    let mut best = 0.0f64;
    let mut best_v = atoms[0].0 + eps;
    let mut mass = 0.0f64;
    let mut j = 0usize;
    let mut prefix = Vec::with_capacity(atoms.len() + 1);
    prefix.push(0.0);
    for &(_, p) in atoms {
        mass += p;
        prefix.push(mass);
    }
    for i in 0..atoms.len() {
        let hi = atoms[i].0 + 2.0 * eps;
        let tol = WINDOW_TOL * (1.0 + hi.abs());
        if j < i {
            j = i;
        }
        while j + 1 < atoms.len() && atoms[j + 1].0 <= hi + tol {
            j += 1;
        }
        let w = prefix[j + 1] - prefix[i];
        if w > best {
            best = w;
            best_v = atoms[i].0 + eps;
        }
    }
    (best.min(1.0), best_v)
}

/// Exact small-ball probability by full enumeration of outcome sums.
pub fn exact_small_ball(
    a: &CoefficientVector,
    eps: f64,
    dist: &DistributionSpec,
) -> Result<SmallBallEstimate> {
    exact_small_ball_with_budget(a, eps, dist, DEFAULT_ATOM_BUDGET)
}

pub fn exact_small_ball_with_budget(
    a: &CoefficientVector,
    eps: f64,
    dist: &DistributionSpec,
    budget: u64,
) -> Result<SmallBallEstimate> {
    if eps.is_nan() || !eps.is_finite() || eps < 0.0 {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    dist.validate_dimension(a.len())?;
    let atoms = sorted_atoms(a, dist, budget)?;
    let (value, v_star) = window_max(&atoms, eps);
    Ok(SmallBallEstimate {
        value,
        method: EstimateMethod::Exact,
        v_star,
        error_band: 0.0,
        sample_count: None,
    })
}

/// Monte Carlo small-ball estimate: the maximum over sample-anchored
/// closed windows of width 2*eps, with the 95% DKW band as the error
/// contract. Deterministic in (seed, samples, dist, a); trials draw from
/// independent substreams so the result is scheduling-independent.
pub fn monte_carlo_small_ball(
    a: &CoefficientVector,
    eps: f64,
    dist: &DistributionSpec,
    samples: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    if samples < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 samples, got {samples}"
        )));
    }
    if eps.is_nan() || !eps.is_finite() || eps < 0.0 {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    dist.validate_dimension(a.len())?;
    let values = a.values();
    let mut sums: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream_rng(seed, "smallball-mc", trial);
            values
                .iter()
                .enumerate()
                .map(|(k, &c)| c * dist.sample_at(&mut rng, k))
                .sum()
        })
        .collect();
    sums.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());

    let mut best = 0usize;
    let mut best_v = sums[0] + eps;
    let mut j = 0usize;
    for i in 0..sums.len() {
        let hi = sums[i] + 2.0 * eps;
        let tol = WINDOW_TOL * (1.0 + hi.abs());
        if j < i {
            j = i;
        }
        while j + 1 < sums.len() && sums[j + 1] <= hi + tol {
            j += 1;
        }
        if j - i + 1 > best {
            best = j - i + 1;
            best_v = sums[i] + eps;
        }
    }
    Ok(SmallBallEstimate {
        value: best as f64 / samples as f64,
        method: EstimateMethod::MonteCarlo,
        v_star: best_v,
        error_band: dkw_band(samples, 0.05),
        sample_count: Some(samples),
    })
}

/// Berry-Esseen bound: sqrt(2/pi) * eps/||a||_2 + C1 * B * (||a||_3/||a||_2)^3.
pub fn clt_bound(a: &CoefficientVector, eps: f64, b: f64, c1: f64) -> Result<BoundReport> {
    if a.l2() == 0.0 {
        return Err(Error::invalid("zero coefficient vector"));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    let ratio = a.l3() / a.l2();
    let value = (2.0 / std::f64::consts::PI).sqrt() * eps / a.l2() + c1 * b * ratio.powi(3);
    Ok(BoundReport {
        bound_name: "clt",
        value,
        inputs: vec![("eps", eps), ("B", b), ("C1", c1)],
        comparison: None,
        error_estimate: None,
        note: None,
    })
}

/// |phi(t)| = |prod_k E exp(i a_k xi_k t)|.
pub fn characteristic_modulus(a: &CoefficientVector, dist: &DistributionSpec, t: f64) -> Result<f64> {
    let mut m = 1.0;
    for &c in a.values() {
        m *= dist.char_modulus(c * t)?;
        if m == 0.0 {
            break;
        }
    }
    Ok(m)
}

/// Raw characteristic-function integral over [-pi/2, pi/2] of
/// |phi(t/eps)| by composite Simpson quadrature. The unspecified
/// multiplicative constant is the caller's business; the report carries
/// the difference against a half-resolution pass as the error estimate.
pub fn esseen_integral(
    a: &CoefficientVector,
    eps: f64,
    dist: &DistributionSpec,
    quad_panels: u32,
) -> Result<BoundReport> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid(
            "the integral formulation requires eps > 0",
        ));
    }
    if quad_panels < 4 {
        return Err(Error::invalid("need at least 4 quadrature panels"));
    }
    // Round up to a multiple of 4 so both the full- and half-resolution
    // Simpson passes see an even panel count.
    let panels = quad_panels.div_ceil(4) * 4;
    let integrand = |t: f64| characteristic_modulus(a, dist, t / eps);
    let fine = simpson(std::f64::consts::FRAC_PI_2, panels, &integrand)?;
    let coarse = simpson(std::f64::consts::FRAC_PI_2, panels / 2, &integrand)?;
    Ok(BoundReport {
        bound_name: "esseen-integral",
        value: fine,
        inputs: vec![("eps", eps), ("quad_panels", panels as f64)],
        comparison: None,
        error_estimate: Some((fine - coarse).abs()),
        note: None,
    })
}

fn simpson(half_range: f64, panels: u32, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    debug_assert!(panels.is_multiple_of(2));
    let a = -half_range;
    let h = 2.0 * half_range / panels as f64;
    let mut acc = f(a)? + f(half_range)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

/// The sine-sum functional f(t) = sum_k sin^2(a_k t / 2); values in [0, n].
pub fn halasz_functional(a: &CoefficientVector, t: f64) -> f64 {
    a.values()
        .iter()
        .map(|&c| {
            let s = (0.5 * c * t).sin();
            s * s
        })
        .sum()
}

fn check_halasz_hypotheses(a: &CoefficientVector, z: f64, eps: f64) -> Result<()> {
    if let Some(bad) = a.values().iter().find(|v| **v < 1.0) {
        return Err(Error::precondition(format!(
            "requires a_k >= 1 for all k; found {bad}"
        )));
    }
    if z.is_nan() || z < 1.0 {
        return Err(Error::precondition(format!("requires z >= 1, got {z}")));
    }
    if eps.is_nan() || eps <= 0.0 || eps >= std::f64::consts::FRAC_PI_4 {
        return Err(Error::precondition(format!(
            "requires 0 < eps < pi/4, got {eps}"
        )));
    }
    Ok(())
}

/// M = max over |t| <= pi/2 of f(z t / eps), located by a Lipschitz-tuned
/// grid plus local refinement. The proved window n/4 <= M <= n is
/// asserted; a violation would be an implementation bug.
pub fn halasz_max(a: &CoefficientVector, z: f64, eps: f64) -> Result<f64> {
    check_halasz_hypotheses(a, z, eps)?;
    let n = a.len() as f64;
    let scale = z / eps;
    let g = |t: f64| halasz_functional(a, scale * t);
    // |g'| <= (z / 2 eps) * sum |a_k|
    let lipschitz = 0.5 * scale * a.l1();
    let half = std::f64::consts::FRAC_PI_2;
    // Coarse pass at absolute error ~1e-4, capped for enormous inputs.
    let points = ((half * lipschitz / 1e-4).ceil() as usize).clamp(64, 2_000_000);
    let h = half / points as f64;
    // At the cap the coarse pass must still pin the peak's cell, or the
    // zoom below may chase a secondary maximum.
    if lipschitz * h / 2.0 > n / 8.0 {
        return Err(Error::capacity(format!(
            "sine-sum oscillates too fast to resolve on {points} grid points \
             (Lipschitz constant {lipschitz:.3e}); rescale the coefficients"
        )));
    }
    let mut best_t = 0.0;
    let mut best = g(0.0);
    for i in 1..=points {
        let t = h * i as f64;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // Zoom refinement around the best coarse point.
    let mut lo = (best_t - h).max(0.0);
    let mut hi = (best_t + h).min(half);
    while hi - lo > 1e-13 {
        let step = (hi - lo) / 32.0;
        let mut local_best = best;
        let mut local_t = best_t;
        for i in 0..=32 {
            let t = lo + step * i as f64;
            let v = g(t);
            if v > local_best {
                local_best = v;
                local_t = t;
            }
        }
        best = local_best;
        best_t = local_t;
        lo = (best_t - step).max(0.0);
        hi = (best_t + step).min(half);
    }
    assert!(
        best >= n / 4.0 - 1e-9 && best <= n + 1e-9,
        "halasz max {best} escapes [n/4, n] = [{}, {n}]",
        n / 4.0
    );
    Ok(best)
}

/// Grid measure of the sublevel set T(m, r) = {t : |t| <= r, f(zt/eps) <= m},
/// with an error bound from the grid pitch and the count of grid points
/// near the level (where classification is uncertain).
pub fn level_set_measure(
    a: &CoefficientVector,
    z: f64,
    eps: f64,
    m: f64,
    r: f64,
    grid_res: u32,
) -> Result<(f64, f64)> {
    if m.is_nan() || m < 0.0 {
        return Err(Error::invalid(format!("level m must be >= 0, got {m}")));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::invalid(format!("radius r must be positive, got {r}")));
    }
    if grid_res == 0 {
        return Err(Error::invalid("grid_res must be positive"));
    }
    let scale = z / eps;
    let lipschitz = 0.5 * scale.abs() * a.l1();
    let h = 2.0 * r / grid_res as f64;
    let near = lipschitz * h / 2.0;
    let mut inside = 0u64;
    let mut uncertain = 0u64;
    for i in 0..grid_res {
        let t = -r + (i as f64 + 0.5) * h;
        let v = halasz_functional(a, scale * t);
        if v <= m {
            inside += 1;
        }
        if (v - m).abs() <= near {
            uncertain += 1;
        }
    }
    Ok((h * inside as f64, h * (uncertain as f64 + 2.0)))
}

/// Outcome of the level-set regularity comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityCheck {
    /// |T(m, pi/2)|
    pub lhs: f64,
    /// (2/l) |T(l^2 m, pi)|
    pub rhs: f64,
    /// Grid slack admitted in the comparison.
    pub slack: f64,
    pub pass: bool,
}

/// Checks |T(m, pi/2)| <= (2/l) |T(l^2 m, pi)| on the grid, given the
/// hypothesis l^2 m <= M.
pub fn regularity_check(
    a: &CoefficientVector,
    z: f64,
    eps: f64,
    m: f64,
    l: u32,
    grid_res: u32,
) -> Result<RegularityCheck> {
    if l < 1 {
        return Err(Error::precondition("requires l >= 1"));
    }
    let m_max = halasz_max(a, z, eps)?;
    let lifted = (l as f64) * (l as f64) * m;
    if lifted > m_max + 1e-9 {
        return Err(Error::precondition(format!(
            "requires l^2 m <= M; got l^2 m = {lifted} > M = {m_max}"
        )));
    }
    let (lhs, err_lhs) = level_set_measure(a, z, eps, m, std::f64::consts::FRAC_PI_2, grid_res)?;
    let (raw_rhs, err_rhs) =
        level_set_measure(a, z, eps, lifted, std::f64::consts::PI, grid_res)?;
    let factor = 2.0 / l as f64;
    let rhs = factor * raw_rhs;
    let slack = err_lhs + factor * err_rhs;
    Ok(RegularityCheck {
        lhs,
        rhs,
        slack,
        pass: lhs <= rhs + slack,
    })
}

/// Evaluates the essential-LCD anti-concentration bound
/// C B K^3 / sqrt(kappa) * (eps + 1/D_(2alpha,2kappa)(a)) + C exp(-c alpha^2 kappa / B^2)
/// with caller-supplied absolute constants C and c. The LCD search runs
/// up to `t_max`; when it is not found there, the 1/D term is dropped
/// (the true D exceeds the horizon, so the bound only improves) and the
/// report notes the censoring.
#[allow(clippy::too_many_arguments)]
pub fn theorem_bound(
    a: &CoefficientVector,
    eps: f64,
    alpha: f64,
    kappa: f64,
    b: f64,
    kbound: f64,
    c_big: f64,
    c_small: f64,
    t_max: f64,
) -> Result<BoundReport> {
    let n = a.len() as f64;
    for &v in a.values() {
        let mag = v.abs();
        if mag < 1.0 || mag > kbound {
            return Err(Error::precondition(format!(
                "requires 1 <= |a_k| <= K = {kbound}; found {v}"
            )));
        }
    }
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 / (6.0 * kbound) {
        return Err(Error::precondition(format!(
            "requires 0 < alpha < 1/(6K) = {}; got {alpha}",
            1.0 / (6.0 * kbound)
        )));
    }
    if kappa.is_nan() || kappa <= 0.0 || kappa >= n {
        return Err(Error::precondition(format!(
            "requires 0 < kappa < n = {n}; got {kappa}"
        )));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    let params = LcdParams::new((2.0 * alpha).min(1.0 - 1e-12), 2.0 * kappa, t_max)?;
    let lcd = essential_lcd(a, &params)?;
    let (inv_d, note) = match lcd.found() {
        Some(d) if d > 0.0 => (1.0 / d, None),
        Some(_) => (f64::INFINITY, Some("degenerate LCD (kappa >= n)".to_string())),
        None => (
            0.0,
            Some(format!("LCD not found within t_max = {t_max}; 1/D term dropped")),
        ),
    };
    let value = c_big * b * kbound.powi(3) / kappa.sqrt() * (eps + inv_d)
        + c_big * (-c_small * alpha * alpha * kappa / (b * b)).exp();
    Ok(BoundReport {
        bound_name: "small-ball-theorem",
        value,
        inputs: vec![
            ("eps", eps),
            ("alpha", alpha),
            ("kappa", kappa),
            ("B", b),
            ("K", kbound),
            ("C", c_big),
            ("c", c_small),
            ("t_max", t_max),
        ],
        comparison: None,
        error_estimate: None,
        note,
    })
}

/// Outcome of the restriction comparison p_eps(a) <= p_eps(P_sigma a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionCheck {
    pub full: f64,
    pub restricted: f64,
    pub pass: bool,
}

/// Verifies the restriction inequality by exact enumeration on both
/// sides. An empty index set leaves the zero sum, whose small-ball
/// probability is 1.
pub fn restriction_check(
    a: &CoefficientVector,
    sigma: &[usize],
    eps: f64,
    dist: &DistributionSpec,
) -> Result<RestrictionCheck> {
    dist.require_exchangeable()?;
    let full = exact_small_ball(a, eps, dist)?.value;
    let restricted = if sigma.is_empty() {
        1.0
    } else {
        let sub = a.restrict(sigma)?;
        exact_small_ball(&sub, eps, dist)?.value
    };
    Ok(RestrictionCheck {
        full,
        restricted,
        pass: full <= restricted + 1e-12,
    })
}
