//! Entry/step distribution descriptions: sampling, finite supports,
//! characteristic-function moduli, and analytic moment metadata.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{next_uniform, sample_standard_normal};

/// A point mass of a discrete distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Symmetric +-1 variable.
    Rademacher,
    /// Standard normal.
    Gaussian,
    /// Finite support with explicit probabilities.
    UniformDiscrete(Vec<Atom>),
    /// Base variable plus deterministic offsets. A single offset applies
    /// to every coordinate; a list is matched to coordinates by index.
    Shifted { base: Box<Family>, offsets: Vec<f64> },
}

/// Distribution of the i.i.d. entries/steps together with moment metadata.
///
/// The metadata is computed analytically at construction: `variance` and
/// the third/fourth moments are exact for the built-in families; for
/// shifted variables the third/fourth entries are Minkowski upper bounds
/// (the variance is shift-invariant).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    variance: f64,
    third_moment_bound: f64,
    fourth_moment_bound: Option<f64>,
    subgaussian_constant: Option<f64>,
}

impl DistributionSpec {
    pub fn rademacher() -> Self {
        Self {
            family: Family::Rademacher,
            variance: 1.0,
            third_moment_bound: 1.0,
            fourth_moment_bound: Some(1.0),
            // Smallest B with P(|xi| > t) <= 2 exp(-t^2/B^2) for all t.
            subgaussian_constant: Some(1.0 / (2.0f64.ln()).sqrt()),
        }
    }

    pub fn gaussian() -> Self {
        Self {
            family: Family::Gaussian,
            variance: 1.0,
            third_moment_bound: (8.0 / std::f64::consts::PI).sqrt(),
            fourth_moment_bound: Some(3.0),
            subgaussian_constant: Some(2.0f64.sqrt()),
        }
    }

    pub fn uniform_discrete(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("discrete support must not be empty"));
        }
        let mut total = 0.0;
        for a in &atoms {
            if !a.value.is_finite() {
                return Err(Error::invalid("support point must be finite"));
            }
            if !(a.prob >= 0.0 && a.prob.is_finite()) {
                return Err(Error::invalid(format!(
                    "probability {} is not a finite non-negative number",
                    a.prob
                )));
            }
            total += a.prob;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "support probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        let mean: f64 = atoms.iter().map(|a| a.prob * a.value).sum();
        let variance: f64 = atoms
            .iter()
            .map(|a| a.prob * (a.value - mean) * (a.value - mean))
            .sum();
        let m3: f64 = atoms.iter().map(|a| a.prob * a.value.abs().powi(3)).sum();
        let m4: f64 = atoms.iter().map(|a| a.prob * a.value.powi(4)).sum();
        Ok(Self {
            family: Family::UniformDiscrete(atoms),
            variance,
            third_moment_bound: m3,
            fourth_moment_bound: Some(m4),
            subgaussian_constant: None,
        })
    }

    /// Shift of `base` by deterministic offsets (one shared value, or one
    /// value per coordinate).
    pub fn shifted(base: DistributionSpec, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("shift offsets must not be empty"));
        }
        if let Some(bad) = offsets.iter().find(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("shift offset {bad} is not finite")));
        }
        let tmax = offsets.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let third = {
            let b = base.third_moment_bound.cbrt() + tmax;
            b * b * b
        };
        let fourth = base.fourth_moment_bound.map(|m| {
            let b = m.powf(0.25) + tmax;
            b.powi(4)
        });
        Ok(Self {
            variance: base.variance,
            third_moment_bound: third,
            fourth_moment_bound: fourth,
            subgaussian_constant: None,
            family: Family::Shifted {
                base: Box::new(base.family),
                offsets,
            },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn third_moment_bound(&self) -> f64 {
        self.third_moment_bound
    }

    pub fn fourth_moment_bound(&self) -> Option<f64> {
        self.fourth_moment_bound
    }

    pub fn subgaussian_constant(&self) -> Option<f64> {
        self.subgaussian_constant
    }

    /// Number of support points, when the support is finite.
    pub fn support_size(&self) -> Option<usize> {
        fn size(f: &Family) -> Option<usize> {
            match f {
                Family::Rademacher => Some(2),
                Family::Gaussian => None,
                Family::UniformDiscrete(atoms) => Some(atoms.len()),
                Family::Shifted { base, .. } => size(base),
            }
        }
        size(&self.family)
    }

    /// Finite support of the variable at coordinate `coord`, or a
    /// capability error for continuous families.
    pub fn finite_support_at(&self, coord: usize) -> Result<Vec<Atom>> {
        fn atoms(f: &Family, coord: usize) -> Result<Vec<Atom>> {
            match f {
                Family::Rademacher => Ok(vec![
                    Atom { value: -1.0, prob: 0.5 },
                    Atom { value: 1.0, prob: 0.5 },
                ]),
                Family::Gaussian => Err(Error::capability(
                    "gaussian entries have no finite support",
                )),
                Family::UniformDiscrete(a) => Ok(a.clone()),
                Family::Shifted { base, offsets } => {
                    let t = offset_at(offsets, coord)?;
                    let mut a = atoms(base, coord)?;
                    for atom in &mut a {
                        atom.value += t;
                    }
                    Ok(a)
                }
            }
        }
        atoms(&self.family, coord)
    }

    /// One draw for coordinate `coord`, consuming exactly one uniform per
    /// underlying variable.
    pub fn sample_at<R: Rng + ?Sized>(&self, rng: &mut R, coord: usize) -> f64 {
        fn draw<R: Rng + ?Sized>(f: &Family, rng: &mut R, coord: usize) -> f64 {
            match f {
                Family::Rademacher => {
                    if next_uniform(rng) < 0.5 {
                        -1.0
                    } else {
                        1.0
                    }
                }
                Family::Gaussian => sample_standard_normal(rng),
                Family::UniformDiscrete(atoms) => {
                    let u = next_uniform(rng);
                    let mut cum = 0.0;
                    for a in atoms {
                        cum += a.prob;
                        if u < cum {
                            return a.value;
                        }
                    }
                    atoms.last().unwrap().value
                }
                Family::Shifted { base, offsets } => {
                    // Offsets were validated at construction.
                    let t = offset_at(offsets, coord).unwrap();
                    draw(base, rng, coord) + t
                }
            }
        }
        draw(&self.family, rng, coord)
    }

    /// Requires a single shared offset (or none) at every shift level;
    /// per-coordinate offset lists are rejected where entries are
    /// exchangeable, e.g. matrices.
    pub fn require_exchangeable(&self) -> Result<()> {
        fn walk(f: &Family) -> Result<()> {
            if let Family::Shifted { base, offsets } = f {
                if offsets.len() != 1 {
                    return Err(Error::invalid(
                        "per-coordinate shift offsets are not meaningful for i.i.d. matrix \
                         entries; use a single shared offset",
                    ));
                }
                walk(base)?;
            }
            Ok(())
        }
        walk(&self.family)
    }

    /// Checks that per-coordinate data (shift offsets) covers every
    /// coordinate of an n-dimensional use.
    pub fn validate_dimension(&self, n: usize) -> Result<()> {
        fn walk(f: &Family, n: usize) -> Result<()> {
            if let Family::Shifted { base, offsets } = f {
                if offsets.len() != 1 && offsets.len() < n {
                    return Err(Error::invalid(format!(
                        "shift offsets cover {} coordinates but the vector has {n}",
                        offsets.len()
                    )));
                }
                walk(base, n)?;
            }
            Ok(())
        }
        walk(&self.family, n)
    }

    /// Modulus of the characteristic function E exp(i*u*xi) at `u`.
    /// Deterministic shifts only rotate the phase, so the modulus is the
    /// same for every coordinate.
    pub fn char_modulus(&self, u: f64) -> Result<f64> {
        fn modulus(f: &Family, u: f64) -> Result<f64> {
            match f {
                Family::Rademacher => Ok(u.cos().abs()),
                Family::Gaussian => Ok((-0.5 * u * u).exp()),
                Family::UniformDiscrete(atoms) => {
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for a in atoms {
                        re += a.prob * (u * a.value).cos();
                        im += a.prob * (u * a.value).sin();
                    }
                    Ok((re * re + im * im).sqrt().min(1.0))
                }
                Family::Shifted { base, .. } => modulus(base, u),
            }
        }
        modulus(&self.family, u)
    }
}

fn offset_at(offsets: &[f64], coord: usize) -> Result<f64> {
    if offsets.len() == 1 {
        Ok(offsets[0])
    } else if coord < offsets.len() {
        Ok(offsets[coord])
    } else {
        Err(Error::invalid(format!(
            "coordinate {coord} has no shift offset (list has {} entries)",
            offsets.len()
        )))
    }
}
