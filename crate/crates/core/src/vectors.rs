//! Coefficient-vector data model: norms, distance to sparse vectors,
//! the compressible/incompressible split of the unit sphere, and
//! spread-part extraction.

use crate::error::{Error, Result};

/// Tolerance for the unit-norm precondition of the sphere classifiers.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// A real coefficient sequence with cached p-norms.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
    l1: f64,
    l2: f64,
    l3: f64,
    linf: f64,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("coefficient vector must have length >= 1"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "coefficient vector contains non-finite value {bad}"
            )));
        }
        let (l1, l2, l3, linf) = compute_norms(&values);
        Ok(Self {
            values,
            l1,
            l2,
            l3,
            linf,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn l3(&self) -> f64 {
        self.l3
    }

    pub fn linf(&self) -> f64 {
        self.linf
    }

    /// Restriction to an index subset (indices must be strictly increasing
    /// and in range). An empty subset is rejected because a coefficient
    /// vector has length >= 1.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("restriction to an empty index set"));
        }
        let mut vals = Vec::with_capacity(indices.len());
        let mut prev: Option<usize> = None;
        for &k in indices {
            if k >= self.len() {
                return Err(Error::invalid(format!("index {k} out of range")));
            }
            if let Some(p) = prev {
                if k <= p {
                    return Err(Error::invalid("indices must be strictly increasing"));
                }
            }
            prev = Some(k);
            vals.push(self.values[k]);
        }
        Self::new(vals)
    }

    /// Scaled copy `c * a`; `c` must be finite and the result finite.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| c * v).collect())
    }

    fn require_unit(&self) -> Result<()> {
        if (self.l2 - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!(
                "expected a unit vector, got l2 norm {}",
                self.l2
            )));
        }
        Ok(())
    }
}

fn compute_norms(values: &[f64]) -> (f64, f64, f64, f64) {
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut l3 = 0.0;
    let mut linf: f64 = 0.0;
    for &v in values {
        let a = v.abs();
        l1 += a;
        l2 += a * a;
        l3 += a * a * a;
        linf = linf.max(a);
    }
    (l1, l2.sqrt(), l3.cbrt(), linf)
}

/// The p-norms of the value sequence: (l1, l2, l3, linf).
pub fn vector_norms(a: &CoefficientVector) -> (f64, f64, f64, f64) {
    (a.l1, a.l2, a.l3, a.linf)
}

/// Parameters of the compressible/incompressible decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressibilityParams {
    pub delta: f64,
    pub rho: f64,
}

impl CompressibilityParams {
    pub fn new(delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!("delta must be in (0,1), got {delta}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid(format!("rho must be in (0,1), got {rho}")));
        }
        Ok(Self { delta, rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compressibility {
    Compressible,
    Incompressible,
}

/// Euclidean distance from `x` to the set of vectors with support size
/// at most `s`: the l2 norm of `x` with its `s` largest-magnitude
/// coordinates removed. Ties between equal magnitudes keep the lower
/// index among the removed ones.
pub fn distance_to_sparse(x: &CoefficientVector, s: usize) -> Result<f64> {
    let n = x.len();
    if s > n {
        return Err(Error::invalid(format!(
            "sparsity budget {s} out of range for length {n}"
        )));
    }
    if s == n {
        return Ok(0.0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Descending by magnitude, ascending index on ties.
    order.sort_by(|&i, &j| {
        x.values[j]
            .abs()
            .partial_cmp(&x.values[i].abs())
            .unwrap()
            .then(i.cmp(&j))
    });
    let tail: f64 = order[s..]
        .iter()
        .map(|&k| x.values[k] * x.values[k])
        .sum();
    Ok(tail.sqrt())
}

/// Classifies a unit vector against the sparse-approximation threshold:
/// compressible iff the distance to the floor(delta*n)-sparse vectors
/// is at most rho.
pub fn classify_compressible(
    x: &CoefficientVector,
    p: &CompressibilityParams,
) -> Result<Compressibility> {
    x.require_unit()?;
    let budget = (p.delta * x.len() as f64).floor() as usize;
    let dist = distance_to_sparse(x, budget)?;
    if dist <= p.rho {
        Ok(Compressibility::Compressible)
    } else {
        Ok(Compressibility::Incompressible)
    }
}

/// Index set of coordinates with rho/sqrt(2n) <= |x_k| <= 1/sqrt(delta*n).
///
/// When `x` is incompressible the returned set always has at least
/// rho^2 * delta * n / 2 elements; that lower bound is asserted here
/// because a violation would indicate a classification bug.
pub fn spread_set(x: &CoefficientVector, p: &CompressibilityParams) -> Result<Vec<usize>> {
    x.require_unit()?;
    let n = x.len() as f64;
    let lo = p.rho / (2.0 * n).sqrt();
    let hi = 1.0 / (p.delta * n).sqrt();
    let sigma: Vec<usize> = x
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            let a = v.abs();
            a >= lo && a <= hi
        })
        .map(|(k, _)| k)
        .collect();
    if classify_compressible(x, p)? == Compressibility::Incompressible {
        let bound = 0.5 * p.rho * p.rho * p.delta * n;
        assert!(
            sigma.len() as f64 >= bound,
            "spread set of an incompressible vector has {} < {bound} elements",
            sigma.len()
        );
    }
    Ok(sigma)
}

/// Coordinates of sqrt(n)*x with magnitude between the truncation levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadPart {
    pub indices: Vec<usize>,
    pub scaled_values: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
}

impl SpreadPart {
    /// The spread coordinates as a coefficient vector.
    pub fn to_vector(&self) -> Result<CoefficientVector> {
        CoefficientVector::new(self.scaled_values.clone())
    }
}

/// Restriction of sqrt(n)*x to the coordinates with K1 <= |sqrt(n)x_k| <= K2,
/// or `None` when no coordinate qualifies.
pub fn spread_part(x: &CoefficientVector, k1: f64, k2: f64) -> Result<Option<SpreadPart>> {
    if !(k1 > 0.0 && k1 < k2) {
        return Err(Error::invalid(format!(
            "truncation levels must satisfy 0 < K1 < K2, got K1={k1}, K2={k2}"
        )));
    }
    let root_n = (x.len() as f64).sqrt();
    let mut indices = Vec::new();
    let mut scaled = Vec::new();
    for (k, &v) in x.values.iter().enumerate() {
        let s = root_n * v;
        if s.abs() >= k1 && s.abs() <= k2 {
            indices.push(k);
            scaled.push(s);
        }
    }
    if indices.is_empty() {
        return Ok(None);
    }
    Ok(Some(SpreadPart {
        indices,
        scaled_values: scaled,
        k1,
        k2,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cv(vals: &[f64]) -> CoefficientVector {
        CoefficientVector::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn norms_on_single_coordinate() {
        let (l1, l2, l3, linf) = vector_norms(&cv(&[1.0, 0.0, 0.0]));
        assert_eq!((l1, l2, l3, linf), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn norms_pythagorean_pair() {
        let (_, l2, _, _) = vector_norms(&cv(&[3.0, 4.0]));
        assert_relative_eq!(l2, 5.0, max_relative = 1e-15);
    }

    #[test]
    fn norms_homogeneous_vector() {
        let (_, l2, l3, _) = vector_norms(&cv(&[1.0; 9]));
        assert_relative_eq!(l2, 3.0, max_relative = 1e-15);
        assert_relative_eq!(l3, 9.0f64.cbrt(), max_relative = 1e-15);
    }

    #[test]
    fn cached_norms_agree_with_recomputation() {
        let x = cv(&[0.3, -1.7, 2.5, 0.0, -0.2]);
        let l2: f64 = x.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(x.l2(), l2, max_relative = 1e-12);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(CoefficientVector::new(vec![]).is_err());
        assert!(CoefficientVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(CoefficientVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn distance_to_sparse_examples() {
        assert_eq!(distance_to_sparse(&cv(&[1.0, 0.0, 0.0, 0.0]), 1).unwrap(), 0.0);
        assert_eq!(distance_to_sparse(&cv(&[3.0, 4.0]), 1).unwrap(), 3.0);
        let x = cv(&[0.5, 0.5, 0.5, 0.5]);
        assert_relative_eq!(
            distance_to_sparse(&x, 2).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn distance_to_sparse_limits_and_range_check() {
        let x = cv(&[3.0, -4.0]);
        assert_eq!(distance_to_sparse(&x, 0).unwrap(), 5.0);
        assert_eq!(distance_to_sparse(&x, 2).unwrap(), 0.0);
        assert!(distance_to_sparse(&x, 3).is_err());
    }

    #[test]
    fn distance_to_sparse_tie_break_keeps_lower_index() {
        // Both coordinates have magnitude 2; budget 1 keeps index 0.
        let x = cv(&[2.0, -2.0]);
        assert_eq!(distance_to_sparse(&x, 1).unwrap(), 2.0);
    }

    #[test]
    fn classify_basis_vector_compressible() {
        let mut vals = vec![0.0; 10];
        vals[0] = 1.0;
        let p = CompressibilityParams::new(0.1, 0.5).unwrap();
        assert_eq!(
            classify_compressible(&cv(&vals), &p).unwrap(),
            Compressibility::Compressible
        );
    }

    #[test]
    fn classify_flat_vector_incompressible() {
        let vals = vec![0.1; 100];
        let p = CompressibilityParams::new(0.1, 0.5).unwrap();
        // tail norm sqrt(1 - 10/100) ~ 0.949 > 0.5
        assert_eq!(
            classify_compressible(&cv(&vals), &p).unwrap(),
            Compressibility::Incompressible
        );
    }

    #[test]
    fn classify_rejects_non_unit() {
        let p = CompressibilityParams::new(0.1, 0.5).unwrap();
        assert!(classify_compressible(&cv(&[2.0, 0.0]), &p).is_err());
    }

    #[test]
    fn spread_set_uniform_vector_is_everything() {
        let n = 16;
        let vals = vec![0.25; n];
        let p = CompressibilityParams::new(0.5, 0.5).unwrap();
        let sigma = spread_set(&cv(&vals), &p).unwrap();
        assert_eq!(sigma, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn spread_set_boundary_inclusion_is_closed() {
        // |x_1| = 1 equals 1/sqrt(delta*n) = 1 exactly; closed bound keeps it.
        let vals = vec![1.0, 0.0, 0.0, 0.0];
        let p = CompressibilityParams::new(0.25, 0.5).unwrap();
        let sigma = spread_set(&cv(&vals), &p).unwrap();
        assert_eq!(sigma, vec![0]);
    }

    #[test]
    fn spread_part_examples() {
        let x = cv(&[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]);
        let sp = spread_part(&x, 0.9, 1.1).unwrap().unwrap();
        assert_eq!(sp.indices, vec![0, 1]);
        assert_relative_eq!(sp.scaled_values[0], 1.0, max_relative = 1e-15);

        let x = cv(&[1.0, 0.0, 0.0, 0.0]);
        assert!(spread_part(&x, 0.5, 1.5).unwrap().is_none());

        assert!(spread_part(&x, 1.5, 0.5).is_err());
    }
}
