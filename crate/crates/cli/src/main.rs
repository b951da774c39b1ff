//! Command-line front end: `anticonc <command> [--config FILE] [--key value]...`

use std::process::ExitCode;

use anticonc_cli::config::{parse_config, Command};
use anticonc_cli::run::run;

const USAGE: &str = "\
anticonc - numerical experiments on random sums and random matrices

USAGE:
  anticonc <command> [--config FILE] [--key value]...

COMMANDS:
  lcd           essential LCD, recurrence set and progression of a vector
  smallball     exact or Monte Carlo small-ball probability p_eps(a)
  bounds-compare  estimate vs CLT / theorem / integral bounds
  matrix-tail   tail of the smallest singular value, square ensemble
  largest-sv    distribution of s_1/sqrt(n)
  singularity   exact and Monte Carlo singularity probability
  distance      distance-to-hyperplane vs normal inner product
  normal-lcd    essential LCD of the random normal's spread part
  rectangular   smallest singular value of n x k samples

OPTIONS:
  --config FILE   JSON config; keys equal flag names; flags override it
  --seed N        master seed (default 0)
  --out DIR       output directory (default anticonc-out)
  --help          this message

Command parameters (--n, --trials, --eps, --alpha, --kappa, --family,
--atoms, --shift, --a, --k1, --k2, --beta, --t-max, --y, --method,
--budget, --quad-points, --bmoment, --kbound, --const-c, --const-c-small,
--c1, --k) are documented in the README; every run writes report.csv,
summary.json and (for curve-producing commands) plot.dat.

EXIT CODES:
  0 success   2 validation error   3 capacity error   4 i/o error
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return ExitCode::from(if args.is_empty() { 2 } else { 0 });
    }
    let Some(command) = Command::from_name(&args[0]) else {
        eprintln!("unknown command \"{}\"\n\n{USAGE}", args[0]);
        return ExitCode::from(2);
    };

    // Split the remainder into --config and ordinary --key value pairs.
    let mut config_path: Option<String> = None;
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        if arg == "--help" || arg == "-h" {
            print!("{USAGE}");
            return ExitCode::from(0);
        }
        let Some(key) = arg.strip_prefix("--") else {
            eprintln!("unexpected argument \"{arg}\" (expected --key value)");
            return ExitCode::from(2);
        };
        let Some(value) = args.get(i + 1) else {
            eprintln!("flag --{key} is missing a value");
            return ExitCode::from(2);
        };
        if key == "config" {
            config_path = Some(value.clone());
        } else {
            flags.push((key.to_string(), value.clone()));
        }
        i += 2;
    }

    let file_text = match &config_path {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => {
                eprintln!("cannot read config file {path}: {e}");
                return ExitCode::from(4);
            }
        },
        None => None,
    };

    let config = match parse_config(command, file_text.as_deref(), &flags) {
        Ok(config) => config,
        Err(errors) => {
            eprintln!("configuration errors:");
            for e in &errors {
                eprintln!("  {e}");
            }
            return ExitCode::from(2);
        }
    };

    match run(&config) {
        Ok(artifacts) => {
            println!("wrote {}", artifacts.report_csv.display());
            println!("wrote {}", artifacts.summary_json.display());
            if let Some(plot) = artifacts.plot_dat {
                println!("wrote {}", plot.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
