//! Command execution: runs the configured experiment and writes
//! report.csv, summary.json, and plot.dat into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anticonc::lcd::{
    density, essential_lcd, extract_progression, recurrence_set, LcdOutcome, LcdParams,
};
use anticonc::randmat::{
    distance_experiment, exact_singularity_probability, labels, largest_singular_stats,
    monte_carlo_singularity, normal_lcd_experiment, rectangular_smin_experiment,
    smallest_singular_tail, LcdTrialStatus,
};
use anticonc::rng::substream_seed;
use anticonc::smallball::{
    clt_bound, esseen_integral, exact_small_ball_with_budget, monte_carlo_small_ball,
    theorem_bound, EstimateMethod, SmallBallEstimate,
};
use anticonc::vectors::CoefficientVector;
use serde_json::{json, Map, Value};

use crate::config::{Command, ConfigError, ExperimentConfig};
use crate::output::{render_csv, render_plot, Cell};

/// Failure modes mapped onto process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Exit 2.
    Validation(Vec<ConfigError>),
    /// Exit 2 except capacity errors, which exit 3.
    Core(anticonc::Error),
    /// Exit 4.
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Core(anticonc::Error::Capacity(_)) => 3,
            RunError::Core(_) => 2,
            RunError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(errs) => {
                writeln!(f, "configuration errors:")?;
                for e in errs {
                    writeln!(f, "  {e}")?;
                }
                Ok(())
            }
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<anticonc::Error> for RunError {
    fn from(e: anticonc::Error) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Validation(vec![e])
    }
}

/// Files written by a run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report_csv: PathBuf,
    pub summary_json: PathBuf,
    pub plot_dat: Option<PathBuf>,
}

struct CommandOutput {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    plot: Option<(Vec<&'static str>, Vec<Vec<f64>>)>,
    summary: Map<String, Value>,
}

/// Runs the experiment and writes the report files. The CSV and plot
/// outputs are byte-identical across re-runs with the same config; the
/// summary differs only in its wall_time_seconds field.
pub fn run(config: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let start = Instant::now();
    let out = execute(config)?;

    let dir = Path::new(&config.out_dir);
    fs::create_dir_all(dir)?;
    let echo = config.echo_lines();

    let report_csv = dir.join("report.csv");
    fs::write(&report_csv, render_csv(&echo, &out.header, &out.rows))?;

    let plot_dat = match &out.plot {
        Some((columns, rows)) => {
            let path = dir.join("plot.dat");
            fs::write(&path, render_plot(&echo, columns, rows))?;
            Some(path)
        }
        None => None,
    };

    let mut summary = Map::new();
    summary.insert("command".into(), json!(config.command.name()));
    let mut cfg_echo = Map::new();
    for (key, value) in &config.params {
        cfg_echo.insert(key.clone(), json!(value.canonical()));
    }
    summary.insert("config".into(), Value::Object(cfg_echo));
    summary.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    for (key, value) in out.summary {
        summary.insert(key, value);
    }
    summary.insert(
        "wall_time_seconds".into(),
        json!(start.elapsed().as_secs_f64()),
    );
    let summary_json = dir.join("summary.json");
    let mut rendered = serde_json::to_string_pretty(&Value::Object(summary)).expect("json");
    rendered.push('\n');
    fs::write(&summary_json, rendered)?;

    Ok(RunArtifacts {
        report_csv,
        summary_json,
        plot_dat,
    })
}

fn execute(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    match config.command {
        Command::Lcd => run_lcd(config),
        Command::Smallball => run_smallball(config),
        Command::BoundsCompare => run_bounds_compare(config),
        Command::MatrixTail => run_matrix_tail(config),
        Command::LargestSv => run_largest_sv(config),
        Command::Singularity => run_singularity(config),
        Command::Distance => run_distance(config),
        Command::NormalLcd => run_normal_lcd(config),
        Command::Rectangular => run_rectangular(config),
    }
}

fn coefficient_vector(config: &ExperimentConfig) -> Result<CoefficientVector, RunError> {
    Ok(CoefficientVector::new(config.get("a").as_list().to_vec())?)
}

fn run_lcd(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let a = coefficient_vector(config)?;
    let alpha = config.get("alpha").as_real();
    let kappa = config.get("kappa").as_real();
    let t_max = config.get("t-max").as_real();
    let y = config.get("y").as_real();
    let params = LcdParams::new(alpha, kappa, t_max)?;

    let outcome = essential_lcd(&a, &params)?;
    let set = recurrence_set(&a, alpha, kappa, y)?;
    let dens = density(&set, y)?;

    let progression = match outcome {
        LcdOutcome::Found(d) if d > 0.0 => Some(extract_progression(&a, &params)?),
        _ => None,
    };

    let mut rows = Vec::with_capacity(a.len());
    for (k, &v) in a.values().iter().enumerate() {
        let (residual, exception) = match &progression {
            Some(p) => (
                Cell::Real(p.residuals[k]),
                Cell::UInt(u64::from(p.exceptions.contains(&k))),
            ),
            None => (Cell::Na, Cell::Na),
        };
        rows.push(vec![Cell::UInt(k as u64), Cell::Real(v), residual, exception]);
    }

    let plot_rows: Vec<Vec<f64>> = set
        .intervals()
        .iter()
        .map(|iv| vec![iv.lo, iv.hi])
        .collect();

    let mut summary = Map::new();
    match outcome {
        LcdOutcome::Found(d) => {
            summary.insert("lcd".into(), json!(d));
            summary.insert(
                "lcd_status".into(),
                json!(if d > 0.0 { "found" } else { "degenerate" }),
            );
        }
        LcdOutcome::NotFound => {
            summary.insert("lcd".into(), Value::Null);
            summary.insert("lcd_status".into(), json!("not-found"));
        }
    }
    if let Some(p) = &progression {
        summary.insert("progression_gap".into(), json!(p.gap));
        summary.insert("progression_length".into(), json!(p.length));
        summary.insert("exception_count".into(), json!(p.exceptions.len()));
    }
    summary.insert("recurrence_density".into(), json!(dens));
    summary.insert("recurrence_measure".into(), json!(set.total_measure()));
    summary.insert("recurrence_intervals".into(), json!(set.intervals().len()));

    Ok(CommandOutput {
        header: vec!["coordinate", "value", "residual", "is_exception"],
        rows,
        plot: Some((vec!["interval_lo", "interval_hi"], plot_rows)),
        summary,
    })
}

fn estimate_cells(eps: f64, est: &SmallBallEstimate) -> Vec<Cell> {
    vec![
        Cell::Real(eps),
        Cell::Str(
            match est.method {
                EstimateMethod::Exact => "exact",
                EstimateMethod::MonteCarlo => "mc",
            }
            .to_string(),
        ),
        Cell::Real(est.value),
        Cell::Real(est.v_star),
        Cell::Real(est.error_band),
        est.sample_count.map_or(Cell::Na, Cell::UInt),
    ]
}

fn run_smallball(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let a = coefficient_vector(config)?;
    let dist = config.distribution()?;
    let method = config.get("method").as_str().to_string();
    let trials = config.get("trials").as_u64();
    let budget = config.get("budget").as_u64();
    let eps_grid = config.get("eps").as_list().to_vec();

    let mut rows = Vec::new();
    let mut plot_rows = Vec::new();
    let mut estimates = Vec::new();
    for &eps in &eps_grid {
        let est = match method.as_str() {
            "exact" => exact_small_ball_with_budget(&a, eps, &dist, budget)?,
            _ => monte_carlo_small_ball(&a, eps, &dist, trials, config.master_seed)?,
        };
        rows.push(estimate_cells(eps, &est));
        plot_rows.push(vec![eps, est.value]);
        estimates.push(json!({
            "eps": eps,
            "value": est.value,
            "v_star": est.v_star,
            "error_band": est.error_band,
        }));
    }

    let mut summary = Map::new();
    summary.insert("estimates".into(), Value::Array(estimates));
    Ok(CommandOutput {
        header: vec!["eps", "method", "value", "v_star", "error_band", "sample_count"],
        rows,
        plot: Some((vec!["eps", "p"], plot_rows)),
        summary,
    })
}

fn run_bounds_compare(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let a = coefficient_vector(config)?;
    let dist = config.distribution()?;
    let n = a.len() as f64;
    let alpha = config.get("alpha").as_real();
    let kappa = config
        .maybe("kappa")
        .map(|v| v.as_real())
        .unwrap_or(n / 4.0);
    let bmoment = config
        .maybe("bmoment")
        .map(|v| v.as_real())
        .unwrap_or_else(|| dist.third_moment_bound());
    let kbound = config
        .maybe("kbound")
        .map(|v| v.as_real())
        .unwrap_or_else(|| a.linf());
    let c_big = config.get("const-c").as_real();
    let c_small = config.get("const-c-small").as_real();
    let c1 = config.get("c1").as_real();
    let t_max = config.get("t-max").as_real();
    let quad = config.get("quad-points").as_u64() as u32;
    let trials = config.get("trials").as_u64();
    let budget = config.get("budget").as_u64();

    let mut rows = Vec::new();
    let mut plot_rows = Vec::new();
    let mut per_eps = Vec::new();
    for &eps in config.get("eps").as_list() {
        let estimate = match exact_small_ball_with_budget(&a, eps, &dist, budget) {
            Ok(est) => est,
            Err(anticonc::Error::Capacity(_)) | Err(anticonc::Error::Capability(_)) => {
                monte_carlo_small_ball(&a, eps, &dist, trials, config.master_seed)?
            }
            Err(e) => return Err(e.into()),
        };
        let clt = clt_bound(&a, eps, bmoment, c1)?.with_comparison(estimate.value);
        let theorem = theorem_bound(
            &a, eps, alpha, kappa, bmoment, kbound, c_big, c_small, t_max,
        )?
        .with_comparison(estimate.value);
        let esseen = if eps > 0.0 {
            Some(esseen_integral(&a, eps, &dist, quad)?)
        } else {
            None
        };
        let (esseen_value, esseen_err) = match &esseen {
            Some(r) => (Cell::Real(r.value), Cell::Real(r.error_estimate.unwrap_or(0.0))),
            None => (Cell::Na, Cell::Na),
        };
        rows.push(vec![
            Cell::Real(eps),
            Cell::Real(estimate.value),
            Cell::Str(
                match estimate.method {
                    EstimateMethod::Exact => "exact",
                    EstimateMethod::MonteCarlo => "mc",
                }
                .to_string(),
            ),
            Cell::Real(clt.value),
            Cell::Real(clt.comparison.unwrap_or(f64::NAN)),
            Cell::Real(theorem.value),
            Cell::Real(theorem.comparison.unwrap_or(f64::NAN)),
            esseen_value,
            esseen_err,
        ]);
        plot_rows.push(vec![eps, estimate.value, clt.value, theorem.value]);
        per_eps.push(json!({
            "eps": eps,
            "estimate": estimate.value,
            "clt_bound": clt.value,
            "theorem_bound": theorem.value,
            "theorem_note": theorem.note,
        }));
    }

    let mut summary = Map::new();
    summary.insert("per_eps".into(), Value::Array(per_eps));
    summary.insert("kappa_effective".into(), json!(kappa));
    summary.insert("bmoment_effective".into(), json!(bmoment));
    summary.insert("kbound_effective".into(), json!(kbound));
    Ok(CommandOutput {
        header: vec![
            "eps",
            "estimate",
            "estimate_method",
            "clt_bound",
            "ratio_clt",
            "theorem_bound",
            "ratio_theorem",
            "esseen_integral",
            "esseen_error",
        ],
        rows,
        plot: Some((vec!["eps", "estimate", "clt", "theorem"], plot_rows)),
        summary,
    })
}

fn run_matrix_tail(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let dist = config.distribution()?;
    let eps_grid = config.get("eps").as_list().to_vec();
    let tail = smallest_singular_tail(n, &dist, &eps_grid, trials, config.master_seed)?;
    let scale = (n as f64).sqrt();

    let rows: Vec<Vec<Cell>> = tail
        .smin_scaled
        .iter()
        .enumerate()
        .map(|(trial, &scaled)| {
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::TAIL_TRIAL,
                    trial as u64,
                )),
                Cell::Real(scaled / scale),
                Cell::Real(scaled),
            ]
        })
        .collect();

    let mut plot_rows = Vec::new();
    let mut per_eps = Vec::new();
    for (i, &eps) in tail.eps_grid.iter().enumerate() {
        let (lo, hi) = tail.wilson_bands[i];
        plot_rows.push(vec![eps, tail.fraction(i), lo, hi]);
        per_eps.push(json!({
            "eps": eps,
            "count": tail.counts[i],
            "fraction": tail.fraction(i),
            "wilson_lo": lo,
            "wilson_hi": hi,
        }));
    }

    let mut summary = Map::new();
    summary.insert("per_eps".into(), Value::Array(per_eps));
    summary.insert("trials".into(), json!(tail.trials));
    Ok(CommandOutput {
        header: vec!["trial", "seed", "s_min", "s_min_scaled"],
        rows,
        plot: Some((vec!["eps", "fraction", "wilson_lo", "wilson_hi"], plot_rows)),
        summary,
    })
}

fn run_largest_sv(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let dist = config.distribution()?;
    let stats = largest_singular_stats(n, &dist, trials, config.master_seed)?;
    let scale = (n as f64).sqrt();

    let rows: Vec<Vec<Cell>> = stats
        .scaled
        .iter()
        .enumerate()
        .map(|(trial, &scaled)| {
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::LARGEST_TRIAL,
                    trial as u64,
                )),
                Cell::Real(scaled * scale),
                Cell::Real(scaled),
            ]
        })
        .collect();

    let mut sorted = stats.scaled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plot_rows: Vec<Vec<f64>> = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![(i + 1) as f64 / sorted.len() as f64, v])
        .collect();

    let mut summary = Map::new();
    summary.insert("mean_scaled".into(), json!(stats.mean));
    summary.insert("median_scaled".into(), json!(stats.median));
    summary.insert("q05_scaled".into(), json!(stats.q05));
    summary.insert("q95_scaled".into(), json!(stats.q95));
    Ok(CommandOutput {
        header: vec!["trial", "seed", "s1", "s1_scaled"],
        rows,
        plot: Some((vec!["cdf", "s1_scaled"], plot_rows)),
        summary,
    })
}

fn run_singularity(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let budget = config.get("budget").as_u64();
    let dist = config.distribution()?;

    let mc = monte_carlo_singularity(n, &dist, trials, config.master_seed)?;
    let rows: Vec<Vec<Cell>> = mc
        .per_trial
        .iter()
        .enumerate()
        .map(|(trial, &singular)| {
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::SINGULARITY_TRIAL,
                    trial as u64,
                )),
                Cell::UInt(u64::from(singular)),
            ]
        })
        .collect();

    let mut summary = Map::new();
    summary.insert("fraction".into(), json!(mc.fraction));
    summary.insert("singular_count".into(), json!(mc.singular_count));
    summary.insert("trials".into(), json!(mc.trials));
    summary.insert("wilson_lo".into(), json!(mc.wilson.0));
    summary.insert("wilson_hi".into(), json!(mc.wilson.1));
    // Exact enumeration when the budget admits it.
    match exact_singularity_probability(n, &dist, budget) {
        Ok(exact) => {
            summary.insert(
                "exact_probability".into(),
                json!(exact.probability.to_string()),
            );
            summary.insert("exact_probability_f64".into(), json!(exact.as_f64()));
            summary.insert("exact_singular_count".into(), json!(exact.singular_count));
            summary.insert("exact_total_count".into(), json!(exact.total_count));
        }
        Err(anticonc::Error::Capacity(_)) => {
            summary.insert("exact_probability".into(), Value::Null);
        }
        Err(e) => return Err(e.into()),
    }

    Ok(CommandOutput {
        header: vec!["trial", "seed", "singular"],
        rows,
        plot: None,
        summary,
    })
}

fn run_distance(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let dist_spec = config.distribution()?;
    let eps_grid = config.get("eps").as_list().to_vec();
    let results = distance_experiment(n, &dist_spec, trials, config.master_seed)?;

    let rows: Vec<Vec<Cell>> = results
        .iter()
        .enumerate()
        .map(|(trial, t)| {
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::DISTANCE_TRIAL,
                    trial as u64,
                )),
                Cell::Real(t.dist),
                Cell::Real(t.inner),
                Cell::Real(t.rel_discrepancy),
                Cell::UInt(u64::from(t.degenerate)),
            ]
        })
        .collect();

    let mut plot_rows = Vec::new();
    let mut per_eps = Vec::new();
    for &eps in &eps_grid {
        let frac =
            results.iter().filter(|t| t.dist < eps).count() as f64 / results.len() as f64;
        plot_rows.push(vec![eps, frac]);
        per_eps.push(json!({"eps": eps, "fraction": frac}));
    }
    let max_rel = results
        .iter()
        .filter(|t| !t.degenerate)
        .map(|t| t.rel_discrepancy)
        .fold(0.0f64, f64::max);
    let degenerate_count = results.iter().filter(|t| t.degenerate).count() as u64;

    let mut summary = Map::new();
    summary.insert("max_rel_discrepancy".into(), json!(max_rel));
    summary.insert("degenerate_count".into(), json!(degenerate_count));
    summary.insert("per_eps".into(), Value::Array(per_eps));
    Ok(CommandOutput {
        header: vec![
            "trial",
            "seed",
            "dist",
            "inner_product",
            "rel_discrepancy",
            "degenerate",
        ],
        rows,
        plot: Some((vec!["eps", "fraction"], plot_rows)),
        summary,
    })
}

fn run_normal_lcd(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let dist = config.distribution()?;
    let k1 = config.get("k1").as_real();
    let k2 = config.get("k2").as_real();
    let alpha = config.get("alpha").as_real();
    let beta = config.get("beta").as_real();
    let t_max = config.get("t-max").as_real();
    let report = normal_lcd_experiment(
        n,
        &dist,
        k1,
        k2,
        alpha,
        beta,
        trials,
        config.master_seed,
        t_max,
    )?;

    let rows: Vec<Vec<Cell>> = report
        .trials
        .iter()
        .enumerate()
        .map(|(trial, t)| {
            let status = match t.status {
                LcdTrialStatus::NotDefined => "notdefined",
                LcdTrialStatus::Found => "found",
                LcdTrialStatus::NotFound => "notfound",
            };
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::NORMAL_LCD_TRIAL,
                    trial as u64,
                )),
                Cell::UInt(t.spread_size as u64),
                Cell::Str(status.to_string()),
                Cell::Real(t.d_censored),
                Cell::UInt(u64::from(t.compressible)),
            ]
        })
        .collect();

    let mut ds: Vec<f64> = report.trials.iter().map(|t| t.d_censored).collect();
    ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plot_rows: Vec<Vec<f64>> = ds
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![(i + 1) as f64 / ds.len() as f64, v])
        .collect();

    let mut summary = Map::new();
    summary.insert("d_q25".into(), json!(report.d_quantiles.0));
    summary.insert("d_median".into(), json!(report.d_quantiles.1));
    summary.insert("d_q75".into(), json!(report.d_quantiles.2));
    summary.insert("not_defined".into(), json!(report.not_defined));
    summary.insert("not_found".into(), json!(report.not_found));
    summary.insert("compressible_count".into(), json!(report.compressible_count));
    Ok(CommandOutput {
        header: vec![
            "trial",
            "seed",
            "spread_size",
            "status",
            "d_censored",
            "compressible",
        ],
        rows,
        plot: Some((vec!["cdf", "d_censored"], plot_rows)),
        summary,
    })
}

fn run_rectangular(config: &ExperimentConfig) -> Result<CommandOutput, RunError> {
    let n = config.get("n").as_u64() as usize;
    let k = config.get("k").as_u64() as usize;
    let trials = config.get("trials").as_u64();
    let dist = config.distribution()?;
    let report = rectangular_smin_experiment(n, k, &dist, trials, config.master_seed)?;
    let scale = (n as f64).sqrt();

    let rows: Vec<Vec<Cell>> = report
        .smin_scaled
        .iter()
        .enumerate()
        .map(|(trial, &scaled)| {
            vec![
                Cell::UInt(trial as u64),
                Cell::UInt(substream_seed(
                    config.master_seed,
                    labels::RECT_TRIAL,
                    trial as u64,
                )),
                Cell::Real(scaled * scale),
                Cell::Real(scaled),
            ]
        })
        .collect();

    let mut sorted = report.smin_scaled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plot_rows: Vec<Vec<f64>> = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![(i + 1) as f64 / sorted.len() as f64, v])
        .collect();

    let mut summary = Map::new();
    summary.insert("p01_scaled".into(), json!(report.p01));
    summary.insert("p05_scaled".into(), json!(report.p05));
    summary.insert("median_scaled".into(), json!(report.median));
    Ok(CommandOutput {
        header: vec!["trial", "seed", "s_min", "s_min_scaled"],
        rows,
        plot: Some((vec!["cdf", "s_min_scaled"], plot_rows)),
        summary,
    })
}
