//! Run reports and their text / CSV renderings.

use std::fmt::Write;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

/// One benched instance. `dual`/`gap` are absent when no certificate could
/// be built (unbounded run), `oracle`/`rd` when the exact reference solve
/// was unavailable (instance too large, unbounded).
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub primal: f64,
    pub dual: Option<f64>,
    pub gap: Option<f64>,
    pub oracle: Option<f64>,
    pub rd: Option<f64>,
    pub sweeps: usize,
    pub wall_ms: f64,
    pub termination: String,
}

pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_csv(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".to_string())
}

fn opt_plain(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.8}")).unwrap_or_else(|| "-".to_string())
}

pub const BENCH_CSV_HEADER: &str = "instance,primal,dual,gap,oracle,rd,sweeps,wall_ms,termination";

pub fn render_bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{BENCH_CSV_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&r.instance),
            r.primal,
            opt_csv(r.dual),
            opt_csv(r.gap),
            opt_csv(r.oracle),
            opt_csv(r.rd),
            r.sweeps,
            r.wall_ms,
            csv_field(&r.termination),
        );
    }
    out
}

pub fn render_bench_text(rows: &[BenchRow]) -> String {
    let name_w = rows.iter().map(|r| r.instance.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:>16}  {:>16}  {:>10}  {:>10}  {:>7}  {:>9}  termination",
        "instance", "primal", "oracle", "gap", "rd", "sweeps", "wall_ms",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<name_w$}  {:>16}  {:>16}  {:>10}  {:>10}  {:>7}  {:>9.2}  {}",
            r.instance,
            format!("{:.8}", r.primal),
            opt_plain(r.oracle),
            opt_sci(r.gap),
            opt_sci(r.rd),
            r.sweeps,
            r.wall_ms,
            r.termination,
        );
    }
    out
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN"));
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 { sorted[mid] } else { (sorted[mid - 1] + sorted[mid]) / 2.0 })
}
