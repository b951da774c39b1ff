//! Property tests for the coefficient-vector module, with a brute-force
//! subset-enumeration oracle for the sparse-approximation distance.

use anticonc::rng::substream_rng;
use anticonc::vectors::{
    classify_compressible, distance_to_sparse, spread_set, CoefficientVector, Compressibility,
    CompressibilityParams,
};
use proptest::prelude::*;
use rand::Rng;

fn cv(vals: &[f64]) -> CoefficientVector {
    CoefficientVector::new(vals.to_vec()).unwrap()
}

/// Exact distance to the s-sparse vectors by enumerating all supports.
fn brute_force_distance(vals: &[f64], s: usize) -> f64 {
    let n = vals.len();
    assert!(n <= 16);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let tail: f64 = (0..n)
            .filter(|k| mask & (1 << k) == 0)
            .map(|k| vals[k] * vals[k])
            .sum();
        best = best.min(tail.sqrt());
    }
    if s == 0 {
        vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        best
    }
}

proptest! {
    #[test]
    fn distance_matches_brute_force(vals in prop::collection::vec(-5.0f64..5.0, 1..9)) {
        let x = cv(&vals);
        for s in 0..=vals.len() {
            let fast = distance_to_sparse(&x, s).unwrap();
            let brute = brute_force_distance(&vals, s);
            prop_assert!((fast - brute).abs() <= 1e-12 * brute.max(1.0));
        }
    }

    #[test]
    fn distance_non_increasing_in_s(vals in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        let x = cv(&vals);
        let mut prev = f64::INFINITY;
        for s in 0..=vals.len() {
            let d = distance_to_sparse(&x, s).unwrap();
            prop_assert!(d <= prev + 1e-15);
            prev = d;
        }
        prop_assert_eq!(distance_to_sparse(&x, vals.len()).unwrap(), 0.0);
        let l2: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((distance_to_sparse(&x, 0).unwrap() - l2).abs() <= 1e-12 * l2.max(1.0));
    }

    #[test]
    fn distance_invariant_under_permutation_and_signs(
        vals in prop::collection::vec(-5.0f64..5.0, 2..10),
        seed in 0u64..1000,
    ) {
        let x = cv(&vals);
        let mut shuffled = vals.clone();
        // Deterministic Fisher-Yates driven by the seed.
        let mut rng = substream_rng(seed, "perm", 0);
        for i in (1..shuffled.len()).rev() {
            let j = (rng.random::<u64>() % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        for v in shuffled.iter_mut() {
            if rng.random::<f64>() < 0.5 {
                *v = -*v;
            }
        }
        let y = cv(&shuffled);
        for s in 0..=vals.len() {
            let dx = distance_to_sparse(&x, s).unwrap();
            let dy = distance_to_sparse(&y, s).unwrap();
            prop_assert!((dx - dy).abs() <= 1e-12 * dx.max(1.0));
        }
    }
}

/// Random unit vector in R^n.
fn random_unit(n: usize, seed: u64) -> CoefficientVector {
    let mut rng = substream_rng(seed, "unit-vector", 0);
    loop {
        let vals: Vec<f64> = (0..n)
            .map(|_| anticonc::rng::sample_standard_normal(&mut rng))
            .collect();
        let norm: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return cv(&vals.iter().map(|v| v / norm).collect::<Vec<_>>());
        }
    }
}

#[test]
fn classification_agrees_with_direct_distance() {
    let p = CompressibilityParams::new(0.2, 0.3).unwrap();
    for seed in 0..200 {
        let x = random_unit(50, seed);
        let budget = (0.2f64 * 50.0).floor() as usize;
        let d = distance_to_sparse(&x, budget).unwrap();
        let want = if d <= 0.3 {
            Compressibility::Compressible
        } else {
            Compressibility::Incompressible
        };
        assert_eq!(classify_compressible(&x, &p).unwrap(), want);
    }
}

#[test]
fn classification_invariant_under_permutation() {
    let p = CompressibilityParams::new(0.15, 0.4).unwrap();
    for seed in 0..50 {
        let x = random_unit(30, seed);
        let mut rng = substream_rng(seed, "classify-perm", 1);
        let mut vals = x.values().to_vec();
        for i in (1..vals.len()).rev() {
            let j = (rng.random::<u64>() % (i as u64 + 1)) as usize;
            vals.swap(i, j);
        }
        let y = cv(&vals);
        assert_eq!(
            classify_compressible(&x, &p).unwrap(),
            classify_compressible(&y, &p).unwrap()
        );
    }
}

/// The spread lemma over a randomized incompressible corpus: every unit
/// vector failing the compressibility test has a spread set of size at
/// least rho^2 delta n / 2. Checked over 1000 vectors (the sizing the
/// acceptance suite also uses).
#[test]
fn spread_lemma_on_incompressible_corpus() {
    let n = 100;
    let p = CompressibilityParams::new(0.2, 0.3).unwrap();
    let bound = 0.5 * p.rho * p.rho * p.delta * n as f64;
    let mut incompressible = 0u64;
    let mut seed = 0u64;
    while incompressible < 1000 {
        let x = random_unit(n, seed);
        seed += 1;
        if classify_compressible(&x, &p).unwrap() == Compressibility::Incompressible {
            incompressible += 1;
            // spread_set asserts the lemma internally as well.
            let sigma = spread_set(&x, &p).unwrap();
            assert!(
                sigma.len() as f64 >= bound,
                "spread set {} below bound {bound}",
                sigma.len()
            );
            let lo = p.rho / (2.0 * n as f64).sqrt();
            let hi = 1.0 / (p.delta * n as f64).sqrt();
            for &k in &sigma {
                let v = x.values()[k].abs();
                assert!(v >= lo && v <= hi);
            }
        }
        assert!(seed < 50_000, "corpus generation stalled");
    }
}
