//! Deterministic report writers: RFC-4180-style CSV with a `#` provenance
//! block, whitespace-delimited plot data, and a JSON summary.

use std::fmt::Write as _;

/// One report cell. Reals are written with 17 significant digits so the
/// files round-trip bit-exactly; censored/unavailable values use "NA".
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    UInt(u64),
    Int(i64),
    Real(f64),
    Str(String),
    Na,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Str(s) => csv_escape(s),
            Cell::Na => "NA".to_string(),
        }
    }
}

/// Full round-trip precision: 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with `# key=value` provenance lines, a mandatory header row, and
/// one line per report row.
pub fn render_csv(echo: &[String], header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    for line in echo {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        let _ = writeln!(out, "{}", rendered.join(","));
    }
    out
}

/// Gnuplot-ready column data with the same provenance block.
pub fn render_plot(echo: &[String], columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for line in echo {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# columns: {}", columns.join(" "));
    for row in rows {
        let rendered: Vec<String> = row.iter().map(|v| fmt_real(*v)).collect();
        let _ = writeln!(out, "{}", rendered.join(" "));
    }
    out
}
