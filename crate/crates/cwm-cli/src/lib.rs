//! Command-line front end for the solver: file-based solve and certify
//! runs, application encoders, the exhaustive dual-construction check, an
//! exact reference solve, and batch benchmarking.
//!
//! Exit codes: 0 success (for `certify`, verdict true), 1 failed
//! verification or case check, 2 bad input, 3 objective unbounded below.

mod format;
mod inputs;
mod report;

pub use format::{parse_spec, write_certificate, write_spec, ParseError};
pub use inputs::{parse_flow, parse_potts, parse_vc, parse_wcnf};
pub use report::OutputFormat;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cwm_core::caseproof::run_case_proof;
use cwm_core::duality::{build_certificate, dual_objective, verify};
use cwm_core::encoders::{
    encode_maxflow, encode_maxsat, encode_min_ones, encode_potts, encode_vertex_cover,
    EncodedInstance,
};
use cwm_core::oracle::{lp_solve_exact, LpOracleError};
use cwm_core::{solve, ProblemSpec, SolverConfig, Termination};
use report::{csv_field, mean, median, render_bench_csv, render_bench_text, BenchRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CERTIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;

#[derive(Parser)]
#[command(name = "cwm", version, about = "Coordinate-wise minimization for hinge-sum LPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverFlags {
    /// Stop when a full sweep improves the objective by less than this.
    #[arg(long, default_value_t = 1e-7)]
    eps: f64,
    /// Step taken off the finite end of a half-infinite minimizer set.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Hard sweep limit.
    #[arg(long, default_value_t = 1_000_000)]
    max_sweeps: usize,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            eps: self.eps,
            delta: self.delta,
            max_sweeps: self.max_sweeps,
            ..SolverConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a .cwm problem file.
    Solve {
        spec: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Solve, then build and verify a dual certificate.
    Certify {
        spec: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        /// Tolerance for certificate construction and verification.
        #[arg(long, default_value_t = 1e-6)]
        tol_eq: f64,
        /// Also write the certificate to this file.
        #[arg(long)]
        cert_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Encode an application input as a .cwm problem file.
    #[command(subcommand)]
    Encode(EncodeCommand),
    /// Check the dual construction over the exhaustive case grid.
    ProveCases,
    /// Solve a .cwm file in exact rational arithmetic (small instances).
    Oracle { spec: PathBuf },
    /// Solve every .cwm file in a directory and summarize.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        /// Tolerance for the per-instance certificates.
        #[arg(long, default_value_t = 1e-6)]
        tol_eq: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Subcommand)]
enum EncodeCommand {
    /// Weighted partial Max-SAT from a DIMACS WCNF file.
    Maxsat {
        input: PathBuf,
        /// Output .cwm path.
        #[arg(short, long)]
        output: PathBuf,
        /// Encode weighted Min-Ones over the hard clauses instead.
        #[arg(long)]
        min_ones: bool,
    },
    /// Weighted vertex cover LP from a list of n/e lines.
    Vc {
        input: PathBuf,
        /// Output .cwm path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Min-cut form of max-flow from a DIMACS flow network.
    Maxflow {
        input: PathBuf,
        /// Output .cwm path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Potts MAP relaxation from potts/theta/edge lines.
    Potts {
        input: PathBuf,
        /// Output .cwm path.
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let _ = env_logger::try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version surface as clap "errors" that exit 0.
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::Solve { spec, solver, format } => cmd_solve(&spec, &solver, format, out, err),
        Command::Certify { spec, solver, tol_eq, cert_out, format } => {
            cmd_certify(&spec, &solver, tol_eq, cert_out.as_deref(), format, out, err)
        }
        Command::Encode(what) => cmd_encode(&what, out, err),
        Command::ProveCases => cmd_prove_cases(out),
        Command::Oracle { spec } => cmd_oracle(&spec, out, err),
        Command::Bench { dir, solver, tol_eq, format } => {
            cmd_bench(&dir, &solver, tol_eq, format, out, err)
        }
    }
}

fn load_spec(path: &Path, err: &mut dyn Write) -> Result<ProblemSpec, i32> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return Err(EXIT_INPUT);
        }
    };
    let spec = match parse_spec(&text) {
        Ok(spec) => spec,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return Err(EXIT_INPUT);
        }
    };
    let report = spec.validate();
    if !report.is_valid() {
        for v in &report.violations {
            let _ = writeln!(err, "error: {}: {v}", path.display());
        }
        return Err(EXIT_INPUT);
    }
    Ok(spec)
}

fn cmd_solve(
    path: &Path,
    flags: &SolverFlags,
    fmt: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let spec = match load_spec(path, err) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let result = match solve(&spec, &flags.config(), None) {
        Ok(result) => result,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    match fmt {
        OutputFormat::Text => {
            let _ = writeln!(out, "instance: {}", path.display());
            let _ = writeln!(out, "objective: {}", result.objective_value);
            let _ = writeln!(out, "sweeps: {}", result.sweeps);
            let _ = writeln!(out, "termination: {}", result.termination);
        }
        OutputFormat::Csv => {
            let _ = writeln!(out, "instance,objective,sweeps,termination");
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(&path.display().to_string()),
                result.objective_value,
                result.sweeps,
                csv_field(&result.termination.to_string()),
            );
        }
    }
    if matches!(result.termination, Termination::Unbounded { .. }) {
        EXIT_UNBOUNDED
    } else {
        EXIT_OK
    }
}

fn cmd_certify(
    path: &Path,
    flags: &SolverFlags,
    tol_eq: f64,
    cert_out: Option<&Path>,
    fmt: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let spec = match load_spec(path, err) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let result = match solve(&spec, &flags.config(), None) {
        Ok(result) => result,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    if matches!(result.termination, Termination::Unbounded { .. }) {
        let _ = writeln!(err, "error: objective unbounded below ({}); nothing to certify", result.termination);
        return EXIT_UNBOUNDED;
    }

    let (cert, interior) = build_certificate(&spec, &result.phi, &result.lam, tol_eq);
    let report = verify(&spec, &result.phi, &result.lam, &cert, tol_eq);
    let dual = dual_objective(&spec, &cert).ok();
    let verdict_str = if report.verdict { "certified" } else { "not certified" };

    match fmt {
        OutputFormat::Text => {
            let _ = writeln!(out, "instance: {}", path.display());
            let _ = writeln!(out, "primal: {}", result.objective_value);
            match dual {
                Some(d) => {
                    let _ = writeln!(out, "dual: {d}");
                    let _ = writeln!(out, "gap: {:e}", report.gap);
                }
                None => {
                    let _ = writeln!(out, "dual: - (multiplier active at an infinite bound)");
                }
            }
            let _ = writeln!(out, "max eq residual (phi): {:e}", report.max_eq_residual_phi);
            let _ = writeln!(out, "max eq residual (lambda): {:e}", report.max_eq_residual_lam);
            let _ = writeln!(out, "range violations: {}", report.range_violations.len());
            let _ = writeln!(out, "cs violations: {}", report.cs_violations.len());
            let _ = writeln!(out, "interior: {}", interior.all_interior);
            let _ = writeln!(out, "sweeps: {}", result.sweeps);
            let _ = writeln!(out, "termination: {}", result.termination);
            let _ = writeln!(out, "verdict: {verdict_str}");
            for v in report.range_violations.iter().take(5) {
                let _ = writeln!(out, "  range: {v:?}");
            }
            for v in report.cs_violations.iter().take(5) {
                let _ = writeln!(out, "  cs: {v:?}");
            }
        }
        OutputFormat::Csv => {
            let _ = writeln!(
                out,
                "instance,primal,dual,gap,eq_residual_phi,eq_residual_lam,range_violations,cs_violations,interior,verdict,sweeps,termination"
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&path.display().to_string()),
                result.objective_value,
                dual.map(|d| d.to_string()).unwrap_or_default(),
                if dual.is_some() { report.gap.to_string() } else { String::new() },
                report.max_eq_residual_phi,
                report.max_eq_residual_lam,
                report.range_violations.len(),
                report.cs_violations.len(),
                interior.all_interior,
                report.verdict,
                result.sweeps,
                csv_field(&result.termination.to_string()),
            );
        }
    }

    if let Some(cert_path) = cert_out {
        let text = write_certificate(&cert, spec.m, spec.n, spec.p);
        if let Err(e) = fs::write(cert_path, text) {
            let _ = writeln!(err, "error: {}: {e}", cert_path.display());
            return EXIT_INPUT;
        }
        if fmt == OutputFormat::Text {
            let _ = writeln!(out, "certificate written: {}", cert_path.display());
        }
    }

    if report.verdict {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    }
}

fn cmd_encode(what: &EncodeCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (input, output) = match what {
        EncodeCommand::Maxsat { input, output, .. }
        | EncodeCommand::Vc { input, output }
        | EncodeCommand::Maxflow { input, output }
        | EncodeCommand::Potts { input, output } => (input, output),
    };
    let text = match fs::read_to_string(input) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", input.display());
            return EXIT_INPUT;
        }
    };

    let parse_fail = |e: ParseError, err: &mut dyn Write| {
        let _ = writeln!(err, "error: {}: {e}", input.display());
        EXIT_INPUT
    };
    let (inst, kind): (EncodedInstance, &str) = match what {
        EncodeCommand::Maxsat { min_ones, .. } => {
            let formula = match parse_wcnf(&text) {
                Ok(f) => f,
                Err(e) => return parse_fail(e, err),
            };
            let encoded = if *min_ones {
                encode_min_ones(&formula, &[])
            } else {
                encode_maxsat(&formula)
            };
            match encoded {
                Ok(inst) => (inst, if *min_ones { "min-ones" } else { "maxsat" }),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        EncodeCommand::Vc { .. } => {
            let graph = match parse_vc(&text) {
                Ok(g) => g,
                Err(e) => return parse_fail(e, err),
            };
            match encode_vertex_cover(&graph) {
                Ok(inst) => (inst, "vertex-cover"),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        EncodeCommand::Maxflow { .. } => {
            let net = match parse_flow(&text) {
                Ok(n) => n,
                Err(e) => return parse_fail(e, err),
            };
            match encode_maxflow(&net) {
                Ok(inst) => (inst, "maxflow"),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        EncodeCommand::Potts { .. } => {
            let model = match parse_potts(&text) {
                Ok(m) => m,
                Err(e) => return parse_fail(e, err),
            };
            match encode_potts(&model) {
                Ok(inst) => (inst, "potts"),
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
    };

    let guarantee = inst.spec.check_guarantee();
    let mut file_text = format!(
        "# {kind} encoding of {}\n# application value = {} * objective + {}\n",
        input.display(),
        inst.transform.sign,
        inst.transform.offset,
    );
    file_text.push_str(&write_spec(&inst.spec));
    if let Err(e) = fs::write(output, file_text) {
        let _ = writeln!(err, "error: {}: {e}", output.display());
        return EXIT_INPUT;
    }

    let _ = writeln!(
        out,
        "wrote {}: m={} n={} p={}",
        output.display(),
        inst.spec.m,
        inst.spec.n,
        inst.spec.p,
    );
    let _ = writeln!(
        out,
        "transform: application value = {} * objective + {}",
        inst.transform.sign, inst.transform.offset,
    );
    if guarantee.satisfied {
        let _ = writeln!(out, "guarantee: satisfied");
    } else {
        let _ = writeln!(out, "guarantee: {} violation(s)", guarantee.violations.len());
    }
    EXIT_OK
}

fn cmd_prove_cases(out: &mut dyn Write) -> i32 {
    let report = run_case_proof();
    let _ = writeln!(
        out,
        "phi rows: {} cases, {} verified, {} skipped (no minimum)",
        report.phi_total, report.phi_verified, report.phi_skipped,
    );
    let _ = writeln!(
        out,
        "lambda rows: {} cases, {} verified, {} skipped (no minimum)",
        report.lam_total, report.lam_verified, report.lam_skipped,
    );
    let _ = writeln!(out, "violated: {}", report.failures.len());
    for failure in report.failures.iter().take(10) {
        let _ = writeln!(out, "  {failure:?}");
    }
    if report.all_hold() {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    }
}

fn cmd_oracle(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let spec = match load_spec(path, err) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    match lp_solve_exact(&spec) {
        Ok(sol) => {
            let _ = writeln!(out, "objective: {}", sol.value);
            let _ = writeln!(out, "exact: {}", sol.exact);
            EXIT_OK
        }
        Err(LpOracleError::Unbounded) => {
            let _ = writeln!(err, "error: objective unbounded below");
            EXIT_UNBOUNDED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn cmd_bench(
    dir: &Path,
    flags: &SolverFlags,
    tol_eq: f64,
    fmt: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let entries = match fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "cwm"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        let _ = writeln!(err, "error: no .cwm files in {}", dir.display());
        return EXIT_INPUT;
    }

    let config = flags.config();
    let mut rows = Vec::with_capacity(paths.len());
    for path in &paths {
        let spec = match load_spec(path, err) {
            Ok(spec) => spec,
            Err(code) => return code,
        };
        let started = Instant::now();
        let result = match solve(&spec, &config, None) {
            Ok(result) => result,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let unbounded = matches!(result.termination, Termination::Unbounded { .. });
        let (dual, gap) = if unbounded {
            (None, None)
        } else {
            let (cert, _) = build_certificate(&spec, &result.phi, &result.lam, tol_eq);
            let dual = dual_objective(&spec, &cert).ok();
            (dual, dual.map(|d| result.objective_value - d))
        };
        let oracle = lp_solve_exact(&spec).ok().map(|sol| sol.value);
        let rd = oracle
            .map(|opt| (result.objective_value - opt).abs() / f64::max(1.0, opt.abs()));
        let instance = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        rows.push(BenchRow {
            instance,
            primal: result.objective_value,
            dual,
            gap,
            oracle,
            rd,
            sweeps: result.sweeps,
            wall_ms,
            termination: result.termination.to_string(),
        });
    }

    let rds: Vec<f64> = rows.iter().filter_map(|r| r.rd).collect();
    match fmt {
        OutputFormat::Text => {
            let _ = write!(out, "{}", render_bench_text(&rows));
            let _ = writeln!(out);
            let _ = writeln!(out, "instances: {}", rows.len());
            match (mean(&rds), median(&rds)) {
                (Some(mean_rd), Some(median_rd)) => {
                    let _ = writeln!(out, "mean rd: {mean_rd:.3e} (over {} oracle values)", rds.len());
                    let _ = writeln!(out, "median rd: {median_rd:.3e}");
                }
                _ => {
                    let _ = writeln!(out, "no oracle values (instances too large or unbounded)");
                }
            }
        }
        OutputFormat::Csv => {
            let _ = write!(out, "{}", render_bench_csv(&rows));
            let _ = writeln!(out, "# instances {}", rows.len());
            if let (Some(mean_rd), Some(median_rd)) = (mean(&rds), median(&rds)) {
                let _ = writeln!(out, "# mean_rd {mean_rd:e}");
                let _ = writeln!(out, "# median_rd {median_rd:e}");
            }
        }
    }
    EXIT_OK
}
