//! Essential least common denominator of a real coefficient vector,
//! the recurrence set as an exact interval union, its density and gap
//! structure, and arithmetic-progression extraction.
//!
//! Everything here is event-exact: windows around integers are closed
//! intervals whose endpoints are computed directly as (m +- alpha)/|a_k|,
//! and a sweep over those endpoints maintains the count of "good"
//! coordinates. No grid is involved; grids appear only as test oracles.

use crate::error::{Error, Result};
use crate::vectors::CoefficientVector;

/// Parameters of the essential LCD search.
///
/// `t_max` is a mandatory search horizon: the LCD of a generic real
/// vector can be arbitrarily large, so an unbounded search must be
/// impossible by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcdParams {
    pub alpha: f64,
    pub kappa: f64,
    pub t_max: f64,
}

impl LcdParams {
    pub fn new(alpha: f64, kappa: f64, t_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must be in (0,1), got {alpha}")));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kappa must be >= 0, got {kappa}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::invalid(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { alpha, kappa, t_max })
    }
}

/// Result of the LCD search over the horizon (0, t_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LcdOutcome {
    /// The infimum is attained at this value (windows are closed).
    Found(f64),
    /// No admissible t at or below the horizon.
    NotFound,
}

impl LcdOutcome {
    pub fn found(&self) -> Option<f64> {
        match self {
            LcdOutcome::Found(d) => Some(*d),
            LcdOutcome::NotFound => None,
        }
    }

    /// The value with NotFound censored at the horizon.
    pub fn censored(&self, t_max: f64) -> f64 {
        self.found().unwrap_or(t_max)
    }
}

/// A closed interval on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Finite union of disjoint closed intervals with cached total measure.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    total_measure: f64,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new(), total_measure: 0.0 }
    }

    /// Builds the set from arbitrary closed intervals, sorting and
    /// merging overlapping or touching ones.
    pub fn from_unmerged(mut raw: Vec<Interval>) -> Result<Self> {
        for iv in &raw {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) || iv.hi < iv.lo {
                return Err(Error::invalid(format!(
                    "bad interval [{}, {}]",
                    iv.lo, iv.hi
                )));
            }
        }
        raw.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let mut merged: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    last.hi = last.hi.max(iv.hi);
                }
                _ => merged.push(iv),
            }
        }
        let total_measure = merged.iter().map(Interval::length).sum();
        Ok(Self { intervals: merged, total_measure })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn contains(&self, t: f64) -> bool {
        // Binary search for the last interval with lo <= t.
        let idx = self.intervals.partition_point(|iv| iv.lo <= t);
        idx > 0 && t <= self.intervals[idx - 1].hi
    }

    /// Measure of the intersection with [-y, y].
    pub fn measure_within(&self, y: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| (iv.hi.min(y) - iv.lo.max(-y)).max(0.0))
            .sum()
    }
}

/// Sweep events: +1 opens a good window, -1 closes one. Opens sort
/// before closes at equal t, which realizes closed-interval semantics.
fn sort_events(events: &mut [(f64, i32)]) {
    events.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1))
    });
}

/// Cap on the total number of sweep windows. A horizon of t needs about
/// t * sum |a_k| windows, so huge coefficients or horizons must fail
/// loudly instead of allocating without bound.
const SWEEP_WINDOW_BUDGET: f64 = 5e7;

fn check_sweep_budget(magnitudes: &[f64], alpha: f64, horizon: f64) -> Result<()> {
    let windows: f64 = magnitudes
        .iter()
        .map(|b| horizon * b + alpha + 1.0)
        .sum();
    if windows > SWEEP_WINDOW_BUDGET {
        return Err(Error::capacity(format!(
            "sweep to horizon {horizon} needs about {windows:.3e} windows \
             (budget {SWEEP_WINDOW_BUDGET:.0}); reduce t_max or rescale the vector"
        )));
    }
    Ok(())
}

/// Per-coordinate good windows for the LCD (nonzero-integer targets),
/// clipped to (0, horizon]. Consecutive windows merge when 2*alpha >= 1.
fn lcd_windows(b: f64, alpha: f64, horizon: f64, out: &mut Vec<Interval>) {
    debug_assert!(b > 0.0);
    let m_max = (horizon * b + alpha).floor() as i64;
    let mut m = 1i64;
    while m <= m_max {
        let lo = (m as f64 - alpha) / b;
        if lo > horizon {
            break;
        }
        // Chain of overlapping windows (only possible when 2*alpha >= 1).
        let mut m_hi = m;
        while m_hi < m_max && (m_hi as f64 + alpha) >= (m_hi as f64 + 1.0 - alpha) {
            m_hi += 1;
        }
        let hi = (m_hi as f64 + alpha) / b;
        out.push(Interval { lo: lo.max(0.0), hi });
        m = m_hi + 1;
    }
}

/// First t in (0, horizon] at which at least `threshold` coordinates are
/// good, given per-coordinate unions of good windows.
fn first_hit(events: &mut [(f64, i32)], threshold: usize) -> Option<f64> {
    sort_events(events);
    let mut count = 0usize;
    for &(t, d) in events.iter() {
        if d > 0 {
            count += 1;
            if count >= threshold {
                return Some(t);
            }
        } else {
            count -= 1;
        }
    }
    None
}

/// Essential least common denominator: the smallest t in (0, t_max] such
/// that all except kappa coordinates of t*a lie within alpha of a nonzero
/// integer. Zero coordinates can never be good and so count against the
/// kappa budget. When floor(kappa) >= n the condition is vacuous for
/// every t > 0 and the infimum is 0, which is returned as Found(0).
///
/// Event endpoints are computed as (m +- alpha)/|a_k| in double
/// precision, so the returned value carries rounding of order
/// 1e-12 * t_max in the worst case.
pub fn essential_lcd(a: &CoefficientVector, p: &LcdParams) -> Result<LcdOutcome> {
    let n = a.len();
    let threshold = n.saturating_sub(p.kappa.floor() as usize);
    if threshold == 0 {
        return Ok(LcdOutcome::Found(0.0));
    }
    let magnitudes: Vec<f64> = a
        .values()
        .iter()
        .map(|v| v.abs())
        .filter(|b| *b > 0.0)
        .collect();
    if magnitudes.len() < threshold {
        // Too many zero coordinates: no t can ever qualify.
        return Ok(LcdOutcome::NotFound);
    }

    // Earliest possible hit: the coordinate whose first window opens last
    // among the `threshold` earliest openers gives a lower bound; start
    // the horizon there and double until found or t_max is exhausted.
    let mut first_opens: Vec<f64> = magnitudes.iter().map(|b| (1.0 - p.alpha) / b).collect();
    first_opens.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut horizon = first_opens[threshold - 1].max(f64::MIN_POSITIVE);
    loop {
        horizon = horizon.min(p.t_max);
        check_sweep_budget(&magnitudes, p.alpha, horizon)?;
        let mut events: Vec<(f64, i32)> = Vec::new();
        let mut windows = Vec::new();
        for &b in &magnitudes {
            windows.clear();
            lcd_windows(b, p.alpha, horizon, &mut windows);
            for w in &windows {
                events.push((w.lo, 1));
                events.push((w.hi, -1));
            }
        }
        if let Some(t) = first_hit(&mut events, threshold) {
            if t <= horizon {
                return Ok(LcdOutcome::Found(t));
            }
        }
        if horizon >= p.t_max {
            return Ok(LcdOutcome::NotFound);
        }
        horizon *= 2.0;
    }
}

/// Exact recurrence set I_(alpha,kappa)(a) intersected with [-y, y]:
/// all t such that at least n - floor(kappa) coordinates of t*a lie
/// within alpha of some integer (zero included). The set is symmetric
/// about 0, so it is swept on [0, y] and mirrored.
pub fn recurrence_set(
    a: &CoefficientVector,
    alpha: f64,
    kappa: f64,
    y: f64,
) -> Result<IntervalSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0,1), got {alpha}")));
    }
    let n = a.len();
    if !(kappa >= 0.0 && (kappa.floor() as usize) < n) {
        return Err(Error::invalid(format!(
            "kappa must satisfy 0 <= kappa < n = {n}, got {kappa}"
        )));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::invalid(format!("y must be positive, got {y}")));
    }
    let threshold = n - kappa.floor() as usize;
    let magnitudes: Vec<f64> = a.values().iter().map(|v| v.abs()).collect();
    check_sweep_budget(&magnitudes, alpha, y)?;

    let mut events: Vec<(f64, i32)> = Vec::new();
    let mut windows = Vec::new();
    for &v in a.values() {
        let b = v.abs();
        if b == 0.0 {
            // dist(0, Z) = 0: good for every t.
            events.push((0.0, 1));
            events.push((y, -1));
            continue;
        }
        windows.clear();
        // Window around integer 0, then the nonzero-integer windows.
        windows.push(Interval { lo: 0.0, hi: (alpha / b).min(y) });
        lcd_windows(b, alpha, y, &mut windows);
        // Merge the m=0 window with the m=1 chain when they touch.
        let merged = IntervalSet::from_unmerged(
            windows.iter().map(|w| Interval { lo: w.lo, hi: w.hi.min(y) }).collect(),
        )?;
        for w in merged.intervals() {
            events.push((w.lo, 1));
            events.push((w.hi, -1));
        }
    }

    sort_events(&mut events);
    let mut count = 0usize;
    let mut start = 0.0;
    let mut positive: Vec<Interval> = Vec::new();
    for &(t, d) in &events {
        if d > 0 {
            count += 1;
            if count == threshold {
                start = t;
            }
        } else {
            if count == threshold {
                positive.push(Interval { lo: start, hi: t });
            }
            count -= 1;
        }
    }
    debug_assert_eq!(count, 0);

    let mut all = Vec::with_capacity(2 * positive.len());
    for iv in &positive {
        all.push(*iv);
        all.push(Interval { lo: -iv.hi, hi: -iv.lo });
    }
    IntervalSet::from_unmerged(all)
}

/// dens(I, y) = |I intersect [-y,y]| / (2y).
pub fn density(set: &IntervalSet, y: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::invalid(format!("y must be positive, got {y}")));
    }
    Ok((set.measure_within(y) / (2.0 * y)).clamp(0.0, 1.0))
}

/// Relative slack used when comparing sweep-derived quantities.
const EVENT_TOL: f64 = 1e-9;

fn check_gap_hypotheses(a: &CoefficientVector, alpha: f64) -> Result<f64> {
    let min_mag = a.values().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let k = a.linf();
    if min_mag < 1.0 {
        return Err(Error::precondition(format!(
            "requires 1 <= |a_k| for all k; min |a_k| = {min_mag}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0 / (6.0 * k)) {
        return Err(Error::precondition(format!(
            "requires 0 < alpha < 1/(6K) = {}; got alpha = {alpha}",
            1.0 / (6.0 * k)
        )));
    }
    Ok(k)
}

/// One audited recurrence-set gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCheck {
    /// Left endpoint of a maximal interval of I within [0, y].
    pub t0: f64,
    /// Whether t0 + 3*alpha landed inside I (must be false).
    pub boundary_in_set: bool,
    /// First point of I beyond t0 + 3*alpha, when one exists in range.
    pub t1: Option<f64>,
    /// t1 - t0, when t1 exists.
    pub gap: Option<f64>,
    pub pass: bool,
}

/// Audit report for the gap structure of the recurrence set.
#[derive(Debug, Clone, PartialEq)]
pub struct GapAuditReport {
    pub checks: Vec<GapCheck>,
    /// D_(2alpha, 2kappa)(a), the proved lower bound for every gap.
    pub lcd_2a_2k: LcdOutcome,
    pub all_pass: bool,
}

/// Verifies, for every maximal interval of I_(alpha,kappa)(a) in [0, y]
/// with left endpoint t0, that t0 + 3*alpha lies outside I and that the
/// next point t1 of I beyond it satisfies t1 - t0 >= D_(2alpha,2kappa)(a).
pub fn gap_audit(
    a: &CoefficientVector,
    alpha: f64,
    kappa: f64,
    y: f64,
) -> Result<GapAuditReport> {
    check_gap_hypotheses(a, alpha)?;
    // Membership queries reach up to y + 3*alpha; extend the sweep a bit
    // beyond so successors of late intervals are visible.
    let reach = y + 4.0 * alpha;
    let set = recurrence_set(a, alpha, kappa, reach)?;
    let non_negative: Vec<Interval> = set
        .intervals()
        .iter()
        .filter(|iv| iv.hi >= 0.0)
        .map(|iv| Interval { lo: iv.lo.max(0.0), hi: iv.hi })
        .collect();

    // Gap lower bound. Observable gaps are at most `reach`, and the gap
    // lemma forces D <= gap for any realized gap, so a horizon just past
    // 2*reach can only miss D when no gap exists at all.
    let d_params = LcdParams::new(2.0 * alpha, 2.0 * kappa, 2.0 * reach + 1.0)?;
    let lcd = essential_lcd(a, &d_params)?;

    let mut checks = Vec::new();
    for iv in non_negative.iter().filter(|iv| iv.lo <= y) {
        let t0 = iv.lo;
        let boundary = t0 + 3.0 * alpha;
        let boundary_in_set = set.contains(boundary);
        let t1 = non_negative
            .iter()
            .map(|j| j.lo)
            .find(|&lo| lo > boundary);
        let gap = t1.map(|t| t - t0);
        let gap_ok = match (gap, lcd.found()) {
            (None, _) => true,
            (Some(g), Some(d)) => g >= d * (1.0 - EVENT_TOL) - EVENT_TOL,
            // A realized gap with no D below the horizon contradicts the
            // gap lemma; flag it as a failure.
            (Some(_), None) => false,
        };
        checks.push(GapCheck {
            t0,
            boundary_in_set,
            t1,
            gap,
            pass: !boundary_in_set && gap_ok,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(GapAuditReport { checks, lcd_2a_2k: lcd, all_pass })
}

/// Outcome of the density bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Whether D_(2alpha,2kappa) was located below its horizon; when it
    /// was not, the 2/D term is dropped, which only tightens the bound.
    pub lcd_found: bool,
    pub pass: bool,
}

/// Checks dens(I_(alpha,kappa)(a), y) <= 3*alpha*(1/(2y) + 2/D_(2alpha,2kappa)(a)).
pub fn lcd_density_bound_check(
    a: &CoefficientVector,
    alpha: f64,
    kappa: f64,
    y: f64,
) -> Result<DensityBoundCheck> {
    check_gap_hypotheses(a, alpha)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::invalid(format!("y must be positive, got {y}")));
    }
    let set = recurrence_set(a, alpha, kappa, y)?;
    let lhs = density(&set, y)?;
    // Horizon 2y covers every gap observable inside [-y, y]; NotFound
    // then certifies that I clusters within one 3*alpha block, so the
    // 1/(2y) term alone is a valid bound.
    let d_params = LcdParams::new(2.0 * alpha, 2.0 * kappa, 2.0 * y + 1.0)?;
    let lcd = essential_lcd(a, &d_params)?;
    let inv_d = lcd.found().map_or(0.0, |d| 2.0 / d);
    let rhs = 3.0 * alpha * (1.0 / (2.0 * y) + inv_d);
    Ok(DensityBoundCheck {
        lhs,
        rhs,
        lcd_found: lcd.found().is_some(),
        pass: lhs <= rhs + 1e-12,
    })
}

/// Arithmetic-progression embedding of the coefficients at the LCD.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionReport {
    /// The essential LCD.
    pub d: f64,
    /// Gap between progression elements, 1/D.
    pub gap: f64,
    /// Progression length: elements are m/D for m = 1..=length.
    pub length: u64,
    /// Distance from |a_k| to the nearest progression element.
    pub residuals: Vec<f64>,
    /// Coordinates whose residual exceeds alpha/D.
    pub exceptions: Vec<usize>,
}

/// Locates the progression {m/D : 1 <= m <= L} that approximates the
/// coefficient magnitudes within alpha/D, except on at most kappa
/// coordinates.
pub fn extract_progression(a: &CoefficientVector, p: &LcdParams) -> Result<ProgressionReport> {
    let d = match essential_lcd(a, p)? {
        LcdOutcome::Found(d) if d > 0.0 => d,
        LcdOutcome::Found(_) => {
            return Err(Error::precondition(
                "essential LCD is degenerate (kappa >= n); no progression",
            ))
        }
        LcdOutcome::NotFound => {
            return Err(Error::precondition(format!(
                "essential LCD not found within t_max = {}",
                p.t_max
            )))
        }
    };
    let length = (d * a.linf() + p.alpha).ceil() as u64;
    let tol = p.alpha / d * (1.0 + EVENT_TOL) + 1e-15;
    let mut residuals = Vec::with_capacity(a.len());
    let mut exceptions = Vec::new();
    for (k, &v) in a.values().iter().enumerate() {
        let mag = v.abs();
        let m = (mag * d).round().clamp(1.0, length as f64);
        let residual = (mag - m / d).abs();
        residuals.push(residual);
        if residual > tol {
            exceptions.push(k);
        }
    }
    let budget = p.kappa.floor() as usize;
    assert!(
        exceptions.len() <= budget,
        "progression at D = {d} leaves {} exceptions, budget {budget}",
        exceptions.len()
    );
    Ok(ProgressionReport {
        d,
        gap: 1.0 / d,
        length,
        residuals,
        exceptions,
    })
}
