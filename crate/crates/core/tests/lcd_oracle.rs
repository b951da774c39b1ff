//! Grid-scan oracles for the sweep-line LCD machinery. The oracle walks
//! a dense t-grid and evaluates the definitions directly; it shares no
//! code with the sweep.

use anticonc::lcd::{essential_lcd, recurrence_set, LcdOutcome, LcdParams};
use anticonc::rng::substream_rng;
use anticonc::vectors::CoefficientVector;
use rand::Rng;

/// Distance from x >= 0 to the nearest nonzero integer.
fn dist_to_nonzero_int(x: f64) -> f64 {
    let r = x.round();
    if r == 0.0 {
        1.0 - x
    } else {
        (x - r).abs()
    }
}

/// Distance from x >= 0 to the nearest integer (zero included).
fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// First grid point t = k*step <= t_max with at least n - floor(kappa)
/// coordinates within alpha of a nonzero integer.
fn grid_scan_lcd(a: &[f64], alpha: f64, kappa: f64, t_max: f64, step: f64) -> Option<f64> {
    let threshold = a.len() - kappa.floor() as usize;
    let steps = (t_max / step).floor() as u64;
    for k in 1..=steps {
        let t = k as f64 * step;
        let good = a
            .iter()
            .filter(|&&v| v != 0.0 && dist_to_nonzero_int(t * v.abs()) <= alpha)
            .count();
        if good >= threshold {
            return Some(t);
        }
    }
    None
}

/// Grid measure of the recurrence set restricted to [-y, y].
fn grid_scan_recurrence_measure(a: &[f64], alpha: f64, kappa: f64, y: f64, step: f64) -> f64 {
    let threshold = a.len() - kappa.floor() as usize;
    let steps = (y / step).floor() as u64;
    let mut count = 0u64;
    for k in 0..=steps {
        let t = k as f64 * step;
        let good = a
            .iter()
            .filter(|&&v| v == 0.0 || dist_to_int(t * v.abs()) <= alpha)
            .count();
        if good >= threshold {
            count += 1;
        }
    }
    // Positive side plus mirror (t = 0 counted once; its cell has
    // measure ~step either way, inside the comparison tolerance).
    2.0 * count as f64 * step
}

#[test]
fn sweep_matches_grid_on_handpicked_vectors() {
    let cases: Vec<(Vec<f64>, f64, f64)> = vec![
        (vec![1.0, 0.5], 0.1, 0.0),
        (vec![1.0, 0.5], 0.1, 1.0),
        (vec![1.0, 2.0, 3.0], 0.1, 0.0),
        (vec![1.3, 2.7, 4.1], 0.2, 1.0),
        (vec![1.0, std::f64::consts::SQRT_2, std::f64::consts::E], 0.3, 0.0),
    ];
    for (vals, alpha, kappa) in cases {
        let a = CoefficientVector::new(vals.clone()).unwrap();
        let p = LcdParams::new(alpha, kappa, 8.0).unwrap();
        let sweep = essential_lcd(&a, &p).unwrap();
        let grid = grid_scan_lcd(&vals, alpha, kappa, 8.0, 1e-5);
        match (sweep, grid) {
            (LcdOutcome::Found(d), Some(g)) => {
                assert!(
                    (d - g).abs() <= 2e-5,
                    "sweep {d} vs grid {g} for {vals:?}"
                );
            }
            (LcdOutcome::NotFound, None) => {}
            (s, g) => panic!("disagreement: sweep {s:?}, grid {g:?} for {vals:?}"),
        }
    }
}

#[test]
fn sweep_matches_grid_on_random_vectors() {
    // Smaller replica of the acceptance corpus: 40 vectors, n <= 12,
    // entries in [1, 5].
    let mut rng = substream_rng(2024, "lcd-oracle", 0);
    for case in 0..40 {
        let n = 2 + (rng.random::<u64>() % 11) as usize;
        let vals: Vec<f64> = (0..n).map(|_| 1.0 + 4.0 * rng.random::<f64>()).collect();
        let alpha = 0.25;
        let kappa = ((case % 3) as usize).min(n - 1) as f64;
        let t_max = 3.0;
        let a = CoefficientVector::new(vals.clone()).unwrap();
        let p = LcdParams::new(alpha, kappa, t_max).unwrap();
        let sweep = essential_lcd(&a, &p).unwrap();
        let grid = grid_scan_lcd(&vals, alpha, kappa, t_max, 1e-5);
        match (sweep, grid) {
            (LcdOutcome::Found(d), Some(g)) => {
                assert!((d - g).abs() <= 2e-5, "case {case}: sweep {d} vs grid {g}");
            }
            (LcdOutcome::NotFound, None) => {}
            (s, g) => panic!("case {case}: sweep {s:?}, grid {g:?}"),
        }

        let set = recurrence_set(&a, alpha, kappa, 2.0).unwrap();
        let grid_measure = grid_scan_recurrence_measure(&vals, alpha, kappa, 2.0, 1e-5);
        assert!(
            (set.total_measure() - grid_measure).abs() <= 1e-3,
            "case {case}: sweep measure {} vs grid {grid_measure}",
            set.total_measure()
        );
    }
}

#[test]
fn sweep_matches_grid_with_wide_alpha_merging() {
    // alpha >= 1/2 chains consecutive integer windows into one; both
    // the LCD and the recurrence sweep must agree with the dense grid
    // through that merge path.
    let mut rng = substream_rng(4242, "lcd-oracle-wide", 0);
    for case in 0..40u64 {
        let n = 1 + (rng.random::<u64>() % 6) as usize;
        let vals: Vec<f64> = (0..n).map(|_| 0.4 + 4.0 * rng.random::<f64>()).collect();
        let alpha = [0.5, 0.6, 0.75, 0.9][(case % 4) as usize];
        let kappa = ((case % 2) as usize).min(n - 1) as f64;
        let t_max = 2.0;
        let a = CoefficientVector::new(vals.clone()).unwrap();
        let p = LcdParams::new(alpha, kappa, t_max).unwrap();
        let sweep = essential_lcd(&a, &p).unwrap();
        let grid = grid_scan_lcd(&vals, alpha, kappa, t_max, 1e-5);
        match (sweep, grid) {
            (LcdOutcome::Found(d), Some(g)) => {
                assert!((d - g).abs() <= 2e-5, "case {case}: sweep {d} vs grid {g}");
            }
            (LcdOutcome::NotFound, None) => {}
            (s, g) => panic!("case {case}: sweep {s:?} vs grid {g:?} ({vals:?}, alpha {alpha})"),
        }

        let set = recurrence_set(&a, alpha, kappa, 1.5).unwrap();
        let grid_measure = grid_scan_recurrence_measure(&vals, alpha, kappa, 1.5, 1e-5);
        assert!(
            (set.total_measure() - grid_measure).abs() <= 1e-3,
            "case {case}: sweep measure {} vs grid {grid_measure} (alpha {alpha})",
            set.total_measure()
        );
    }
}

#[test]
fn recurrence_set_with_zero_coordinates_matches_grid() {
    let vals = vec![0.0, 1.3, 0.0, 2.1];
    let a = CoefficientVector::new(vals.clone()).unwrap();
    for kappa in [0.0, 1.0, 3.0] {
        let set = recurrence_set(&a, 0.2, kappa, 2.0).unwrap();
        let grid = grid_scan_recurrence_measure(&vals, 0.2, kappa, 2.0, 1e-5);
        assert!(
            (set.total_measure() - grid).abs() <= 1e-3,
            "kappa {kappa}: {} vs {grid}",
            set.total_measure()
        );
    }
}

#[test]
fn found_lcd_is_a_two_sided_infimum() {
    // At t = D the defining count must hold; just below D it must not.
    let mut rng = substream_rng(31337, "lcd-infimum", 0);
    let mut checked = 0;
    for case in 0..120u64 {
        let n = 2 + (rng.random::<u64>() % 9) as usize;
        let vals: Vec<f64> = (0..n).map(|_| 0.5 + 4.0 * rng.random::<f64>()).collect();
        let alpha = 0.2 + 0.15 * ((case % 3) as f64);
        let kappa = ((case % 3) as usize).min(n - 1) as f64;
        let a = CoefficientVector::new(vals.clone()).unwrap();
        let p = LcdParams::new(alpha, kappa, 5.0).unwrap();
        let Some(d) = essential_lcd(&a, &p).unwrap().found() else {
            continue;
        };
        checked += 1;
        let threshold = n - kappa.floor() as usize;
        let count_at = |t: f64, slack: f64| {
            vals.iter()
                .filter(|&&v| dist_to_nonzero_int(t * v.abs()) <= alpha + slack)
                .count()
        };
        assert!(
            count_at(d, 1e-9) >= threshold,
            "case {case}: count at D = {d} below threshold {threshold}"
        );
        let below = d * (1.0 - 1e-7) - 1e-12;
        if below > 0.0 {
            assert!(
                count_at(below, -1e-9) < threshold,
                "case {case}: count already at threshold below D = {d}"
            );
        }
    }
    assert!(checked > 40, "only {checked} cases had a located LCD");
}

#[test]
fn recurrence_set_total_measure_matches_interval_sum() {
    let mut rng = substream_rng(7, "lcd-oracle-measure", 0);
    for _ in 0..50 {
        let n = 1 + (rng.random::<u64>() % 8) as usize;
        let vals: Vec<f64> = (0..n).map(|_| 0.5 + 4.0 * rng.random::<f64>()).collect();
        let a = CoefficientVector::new(vals).unwrap();
        let set = recurrence_set(&a, 0.3, 0.0, 5.0).unwrap();
        let sum: f64 = set.intervals().iter().map(|iv| iv.hi - iv.lo).sum();
        assert!((sum - set.total_measure()).abs() <= 1e-12 * sum.max(1.0));
        // Strict disjointness after merging.
        for w in set.intervals().windows(2) {
            assert!(w[0].hi < w[1].lo);
        }
    }
}

mod interval_set_properties {
    use anticonc::lcd::{Interval, IntervalSet};
    use proptest::prelude::*;

    fn arb_intervals() -> impl Strategy<Value = Vec<Interval>> {
        prop::collection::vec((-50.0f64..50.0, 0.0f64..10.0), 0..24)
            .prop_map(|pairs| pairs.into_iter().map(|(lo, w)| Interval { lo, hi: lo + w }).collect())
    }

    proptest! {
        #[test]
        fn merge_is_idempotent_and_preserves_membership(raw in arb_intervals()) {
            let set = IntervalSet::from_unmerged(raw.clone()).unwrap();
            let again = IntervalSet::from_unmerged(set.intervals().to_vec()).unwrap();
            prop_assert_eq!(set.clone(), again);
            // Disjointness and ordering.
            for w in set.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            // Every raw endpoint stays a member.
            for iv in &raw {
                prop_assert!(set.contains(iv.lo));
                prop_assert!(set.contains(iv.hi));
                prop_assert!(set.contains(0.5 * (iv.lo + iv.hi)));
            }
        }

        #[test]
        fn measure_dominates_each_piece_and_sums_disjoint(raw in arb_intervals()) {
            let set = IntervalSet::from_unmerged(raw.clone()).unwrap();
            let longest = raw.iter().map(|iv| iv.hi - iv.lo).fold(0.0f64, f64::max);
            let total: f64 = raw.iter().map(|iv| iv.hi - iv.lo).sum();
            prop_assert!(set.total_measure() >= longest - 1e-12);
            prop_assert!(set.total_measure() <= total + 1e-9);
            // Window restriction never exceeds the full measure.
            prop_assert!(set.measure_within(10.0) <= set.total_measure() + 1e-12);
        }
    }
}
