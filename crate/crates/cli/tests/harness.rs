//! End-to-end tests of the binary: exit codes, file schemas, config
//! handling.

use std::path::Path;
use std::process::Command as Process;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_anticonc"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn matrix_tail_schema_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "matrix-tail",
            "--n",
            "10",
            "--trials",
            "120",
            "--eps",
            "0.1,0.3",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let report = read(&out.join("report.csv"));
    let header = report
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap();
    assert_eq!(header, "trial,seed,s_min,s_min_scaled");
    let data_rows = report
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .count();
    assert_eq!(data_rows, 120);
    assert!(report.lines().any(|l| l.starts_with("# n=10")));
    assert!(report.lines().any(|l| l.starts_with("# command=matrix-tail")));

    let plot = read(&out.join("plot.dat"));
    assert!(plot.lines().any(|l| l.contains("eps fraction wilson_lo wilson_hi")));
    let plot_rows = plot.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(plot_rows, 2);

    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["command"], "matrix-tail");
    assert_eq!(summary["config"]["n"], "10");
    assert!(summary["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(summary["per_eps"].as_array().unwrap().len(), 2);
}

#[test]
fn summary_aggregates_recompute_from_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "largest-sv",
            "--n",
            "12",
            "--trials",
            "60",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report = read(&out.join("report.csv"));
    let scaled: Vec<f64> = report
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    let reported = summary["mean_scaled"].as_f64().unwrap();
    assert!(
        (mean - reported).abs() <= 1e-12 * reported.abs().max(1.0),
        "row mean {mean} vs summary {reported}"
    );
}

#[test]
fn validation_errors_exit_2_and_name_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "lcd",
            "--a",
            "1,2",
            "--alpha",
            "1.5",
            "--bogus",
            "1",
            "--out",
            tmp.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("alpha"), "{stderr}");
    assert!(stderr.contains("bogus"), "{stderr}");
}

#[test]
fn capacity_error_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let a: Vec<String> = (0..30).map(|_| "1".to_string()).collect();
    let output = bin()
        .args([
            "smallball",
            "--a",
            &a.join(","),
            "--eps",
            "0",
            "--method",
            "exact",
            "--out",
            tmp.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("budget"), "{stderr}");
}

#[test]
fn unwritable_output_dir_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "file, not a directory").unwrap();
    let out = blocker.join("sub");
    let output = bin()
        .args([
            "smallball",
            "--a",
            "1,1",
            "--eps",
            "0",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{"a": [1, 1, 1, 1], "eps": [0.0], "method": "exact"}"#,
    )
    .unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "smallball",
            "--config",
            cfg_path.to_str().unwrap(),
            "--eps",
            "1.0",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report = read(&out.join("report.csv"));
    // eps overridden to 1.0; p_1(1,1,1,1) = (6+4)/16 = 0.625.
    assert!(report.lines().any(|l| l.starts_with("# eps=1")));
    let row = report
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .unwrap();
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(value, 0.625);
}

#[test]
fn duplicate_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("cfg.json");
    std::fs::write(&cfg_path, r#"{"a": [1], "eps": [0], "eps": [1]}"#).unwrap();
    let output = bin()
        .args(["smallball", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("eps") && stderr.contains("duplicate"), "{stderr}");
}

#[test]
fn singularity_summary_carries_exact_rational() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "singularity",
            "--n",
            "2",
            "--trials",
            "2000",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["exact_probability"], "1/2");
    assert_eq!(summary["exact_probability_f64"], 0.5);
    // No curve for this command.
    assert!(!out.join("plot.dat").exists());
}

#[test]
fn lcd_command_reports_progression() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "lcd",
            "--a",
            "1,1,1",
            "--alpha",
            "0.1",
            "--kappa",
            "0",
            "--y",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["lcd"], 0.9);
    assert_eq!(summary["lcd_status"], "found");
    assert_eq!(summary["exception_count"], 0);
    // Recurrence intervals around 0 and +-1, clipped at y = 2... listed
    // in plot.dat as lo/hi pairs.
    let plot = read(&out.join("plot.dat"));
    let rows = plot.lines().filter(|l| !l.starts_with('#')).count();
    assert!(rows >= 3, "{plot}");
}

#[test]
fn report_schemas_are_pinned_per_command() {
    // Golden header rows: any change here is a breaking schema change.
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>, &str)> = vec![
        (
            "lcd",
            vec!["--a", "1,2", "--y", "2"],
            "coordinate,value,residual,is_exception",
        ),
        (
            "smallball",
            vec!["--a", "1,1", "--eps", "0.5"],
            "eps,method,value,v_star,error_band,sample_count",
        ),
        (
            "bounds-compare",
            vec!["--a", "1,1,1,1", "--eps", "0.5", "--alpha", "0.05"],
            "eps,estimate,estimate_method,clt_bound,ratio_clt,theorem_bound,ratio_theorem,esseen_integral,esseen_error",
        ),
        (
            "matrix-tail",
            vec!["--n", "8", "--trials", "100"],
            "trial,seed,s_min,s_min_scaled",
        ),
        (
            "largest-sv",
            vec!["--n", "8", "--trials", "10"],
            "trial,seed,s1,s1_scaled",
        ),
        (
            "singularity",
            vec!["--n", "2", "--trials", "500"],
            "trial,seed,singular",
        ),
        (
            "distance",
            vec!["--n", "6", "--trials", "20"],
            "trial,seed,dist,inner_product,rel_discrepancy,degenerate",
        ),
        (
            "normal-lcd",
            vec!["--n", "6", "--trials", "10"],
            "trial,seed,spread_size,status,d_censored,compressible",
        ),
        (
            "rectangular",
            vec!["--n", "12", "--k", "3", "--trials", "10"],
            "trial,seed,s_min,s_min_scaled",
        ),
    ];
    for (command, extra, want_header) in cases {
        let out = tmp.path().join(command);
        let mut args = vec![command.to_string()];
        args.extend(extra.iter().map(|s| s.to_string()));
        args.push("--out".into());
        args.push(out.to_string_lossy().to_string());
        let status = bin().args(&args).status().unwrap();
        assert!(status.success(), "{command} failed");
        let report = read(&out.join("report.csv"));
        let header = report.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, want_header, "schema drift in {command}");
    }
}

#[test]
fn lcd_not_found_reports_na_cells() {
    // 1 and sqrt(2) share no near-integer time below t_max = 2 at
    // alpha = 0.01; the report keeps the rows with NA residuals.
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "lcd",
            "--a",
            "1,1.4142135623730951",
            "--alpha",
            "0.01",
            "--t-max",
            "2",
            "--y",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["lcd"], serde_json::Value::Null);
    assert_eq!(summary["lcd_status"], "not-found");
    let report = read(&out.join("report.csv"));
    let row = report
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .unwrap();
    assert!(row.ends_with("NA,NA"), "{row}");
}

#[test]
fn unknown_command_exits_2() {
    let output = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let output = bin().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("matrix-tail"));
}
