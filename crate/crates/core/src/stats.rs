//! Small statistics toolbox: binomial/empirical confidence bands,
//! quantiles, and least-squares slopes used by the experiment reports.

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "wilson_interval needs trials > 0");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (Z_95 / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - alpha.
pub fn dkw_band(samples: u64, alpha: f64) -> f64 {
    assert!(samples > 0 && alpha > 0.0 && alpha < 1.0);
    ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}

/// Quantile of a sorted slice by linear interpolation between order
/// statistics (type 7, the numpy default).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median_sorted(sorted: &[f64]) -> f64 {
    quantile_sorted(sorted, 0.5)
}

/// Ordinary least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let mx = mean(x);
    let my = mean(y);
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

/// Least-squares slope of a line through the origin.
pub fn ls_slope_through_origin(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let num: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let den: f64 = x.iter().map(|a| a * a).sum();
    num / den
}

/// Slope of log(y) against log(x); inputs must be strictly positive.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ls_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_brackets_the_point_estimate() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((lo - 0.404).abs() < 5e-3, "lo={lo}");
        assert!((hi - 0.596).abs() < 5e-3, "hi={hi}");
    }

    #[test]
    fn wilson_interval_handles_extremes() {
        let (lo, hi) = wilson_interval(0, 10);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(10, 10);
        assert!(lo > 0.65);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dkw_band_matches_formula() {
        let b = dkw_band(100_000, 0.05);
        assert!((b - ((2.0f64 / 0.05).ln() / 2e5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert_eq!(median_sorted(&v), 2.5);
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [2.0, 4.0, 6.0];
        assert!((ls_slope(&x, &y) - 2.0).abs() < 1e-12);
        assert!((ls_slope_through_origin(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let x = [8.0f64, 16.0, 32.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.5)).collect();
        assert!((log_log_slope(&x, &y) + 1.5).abs() < 1e-12);
    }
}
