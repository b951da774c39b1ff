//! Numerical laboratory for the anti-concentration of random sums and
//! the invertibility of random matrices.
//!
//! The crate has four subject areas:
//!
//! - [`vectors`]: coefficient vectors, sparse-approximation distance,
//!   the compressible/incompressible split, spread parts;
//! - [`lcd`]: the essential least common denominator of a real vector,
//!   recurrence sets as exact interval unions, gap and density audits,
//!   arithmetic-progression extraction;
//! - [`smallball`]: exact and Monte Carlo small-ball probabilities with
//!   every computable bound (CLT, characteristic-function integral,
//!   sine-sum level sets, the LCD-driven anti-concentration bound);
//! - [`randmat`]: matrix ensembles, singular spectra, singularity
//!   probabilities, distances to random hyperplanes, random-normal LCD
//!   and rectangular experiments.
//!
//! Supporting modules: [`dist`] (entry distributions), [`rng`]
//! (deterministic substreams), [`stats`] (confidence bands, quantiles),
//! and [`error`].

pub mod dist;
pub mod error;
pub mod lcd;
pub mod randmat;
pub mod rng;
pub mod smallball;
pub mod stats;
pub mod vectors;

pub use error::{Error, Result};
