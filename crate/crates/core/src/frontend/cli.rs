//! Command-line driver. Exit codes: 0 success, 1 failed theorem check,
//! 2 usage or input error, 3 numeric failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::expr::{Equivalence, EquivalenceConfig};
use crate::jet::{BundleSpec, Parameter};
use crate::numeric::{self, JacobiProblem, NumericError};
use crate::variational::CommutationReport;

use super::parse::parse_expr;
use super::render::{json_expr, render_system, Format};
use super::Model;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "jetvar",
    version,
    about = "Variational equations, deviation systems and Jacobi fields on jet bundles"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the numeric equivalence fallback.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Chart order, overriding the inferred one.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the Euler-Lagrange or Hamilton equations of a model.
    Derive { file: PathBuf },
    /// Emit the deviation system: the equations and their vertical derivatives.
    Deviate { file: PathBuf },
    /// Check that the vertical extension commutes with the model's operator.
    Check { file: PathBuf },
    /// Integrate the base solution and a Jacobi field along it.
    Simulate(Simulate),
    /// Residual of s + eps*psi in the original equations.
    Residual(Residual),
}

#[derive(Args, Debug)]
struct Initial {
    file: PathBuf,
    /// Base initial data, `name=value,...`; values may use `pi`.
    #[arg(long)]
    init: String,
    /// Jacobi initial data; omitted components start at zero.
    #[arg(long)]
    jacobi_init: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, allow_negative_numbers = true)]
    t1: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Simulate {
    #[command(flatten)]
    initial: Initial,
}

#[derive(Args, Debug)]
struct Residual {
    #[command(flatten)]
    initial: Initial,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3])]
    eps: Vec<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<NumericError> for Failure {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::InitialData(_)
            | NumericError::InvalidGrid(_)
            | NumericError::InvalidEpsilon(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

struct Context {
    format: Format,
    config: EquivalenceConfig,
    order: Option<usize>,
}

fn load(path: &Path, order: Option<usize>) -> Result<Model, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Model::parse_with_order(&text, order)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// `name=value,...`, with values given as numbers or constant expressions
/// in `pi`.
fn parse_assignments(src: &str) -> Result<BTreeMap<String, f64>, Failure> {
    let constants = BundleSpec::build(
        vec!["t".into()],
        vec!["y".into()],
        vec![Parameter {
            name: "pi".into(),
            value: None,
        }],
    )
    .expect("fixed chart");
    let mut out = BTreeMap::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((name, value)) = item.split_once('=') else {
            return Err(Failure::Usage(format!(
                "expected `name=value`, found `{item}`"
            )));
        };
        let name = name.trim().to_string();
        let value = match value.trim().parse::<f64>() {
            Ok(v) => v,
            Err(_) => {
                let e = parse_expr(value.trim(), &constants)
                    .map_err(|e| Failure::Usage(format!("value of `{name}`: {}", e.message)))?;
                e.eval_with(&|s| (s.name() == "pi").then_some(std::f64::consts::PI))
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        Failure::Usage(format!("value of `{name}` is not a finite constant"))
                    })?
            }
        };
        if out.insert(name.clone(), value).is_some() {
            return Err(Failure::Usage(format!("`{name}` is given twice")));
        }
    }
    Ok(out)
}

fn problem(ctx: &Context, args: &Initial) -> Result<JacobiProblem, Failure> {
    let model = load(&args.file, ctx.order)?;
    let system = model
        .deviation()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let base_init = parse_assignments(&args.init)?;
    let jacobi_init = match &args.jacobi_init {
        Some(s) => parse_assignments(s)?,
        None => numeric::deviation_state_names(&system)?
            .1
            .into_iter()
            .map(|n| (n, 0.0))
            .collect(),
    };
    Ok(JacobiProblem::new(
        system,
        base_init,
        jacobi_init,
        args.t0,
        args.t1,
        args.dt,
    )?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn outcome_tag(e: &Equivalence) -> &'static str {
    match e {
        Equivalence::Symbolic => "symbolic",
        Equivalence::Numeric { .. } => "numeric",
        Equivalence::Distinct { .. } => "distinct",
        Equivalence::Undetermined { .. } => "undetermined",
    }
}

fn render_report(report: &CommutationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let pairs: Vec<_> = report
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "label": p.label,
                        "lhs": json_expr(&p.lhs),
                        "rhs": json_expr(&p.rhs),
                        "outcome": outcome_tag(&p.outcome),
                        "detail": p.outcome.to_string(),
                    })
                })
                .collect();
            let doc = json!({
                "theorem": report.theorem,
                "passed": report.passed(),
                "summary": report.summary(),
                "pairs": pairs,
            });
            format!("{doc}\n")
        }
        _ => format!("{report}\n"),
    }
}

fn check_exit(report: &CommutationReport) -> i32 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let ctx = Context {
        format: cli.format,
        config: cli
            .seed
            .map_or_else(EquivalenceConfig::default, EquivalenceConfig::with_seed),
        order: cli.order,
    };
    let io = |e: std::io::Error| Failure::Usage(format!("writing output: {e}"));
    match cli.command {
        Command::Derive { file } => {
            let sys = load(&file, ctx.order)?
                .equations()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            out.write_all(render_system(&sys, ctx.format).as_bytes())
                .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Deviate { file } => {
            let sys = load(&file, ctx.order)?
                .deviation()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            out.write_all(render_system(&sys, ctx.format).as_bytes())
                .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Check { file } => {
            let report = load(&file, ctx.order)?
                .check(&ctx.config)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            out.write_all(render_report(&report, ctx.format).as_bytes())
                .map_err(io)?;
            Ok(check_exit(&report))
        }
        Command::Simulate(Simulate { initial }) => {
            let prob = problem(&ctx, &initial)?;
            let (s, psi) = numeric::solve_jacobi(&prob)?;
            let joined = s.join(&psi);
            let csv = joined.to_csv();
            match &initial.out {
                None => out.write_all(csv.as_bytes()).map_err(io)?,
                Some(path) => {
                    write_file(path, &csv)?;
                    let summary = match ctx.format {
                        Format::Json => format!(
                            "{}\n",
                            json!({
                                "out": path.display().to_string(),
                                "rows": joined.len(),
                                "columns": joined.names,
                                "method": joined.method,
                                "dt": initial.dt,
                                "t0": initial.t0,
                                "t1": initial.t1,
                            })
                        ),
                        _ => format!(
                            "{} rows of t,{} ({}, dt = {}) written to {}\n",
                            joined.len(),
                            joined.names.join(","),
                            joined.method,
                            initial.dt,
                            path.display()
                        ),
                    };
                    out.write_all(summary.as_bytes()).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Residual(Residual { initial, eps }) => {
            let prob = problem(&ctx, &initial)?;
            let table = numeric::perturbation_residual(&prob, &eps)?;
            if let Some(path) = &initial.out {
                write_file(path, &table.to_csv())?;
            }
            let report = match ctx.format {
                Format::Json => {
                    let rows: Vec<_> = table
                        .rows
                        .iter()
                        .map(|r| json!({"eps": r.eps, "residual": r.residual}))
                        .collect();
                    format!(
                        "{}\n",
                        json!({"rows": rows, "exponent": table.exponent, "norm": table.norm, "method": "rk4", "dt": initial.dt})
                    )
                }
                _ => {
                    let mut text = String::from("eps                      residual\n");
                    for r in &table.rows {
                        text.push_str(&format!("{:<24.16e} {:.16e}\n", r.eps, r.residual));
                    }
                    match table.exponent {
                        Some(p) => text
                            .push_str(&format!("fitted exponent: {p:.4} (norm: {})\n", table.norm)),
                        None => {
                            text.push_str(&format!("fitted exponent: n/a (norm: {})\n", table.norm))
                        }
                    }
                    text
                }
            };
            out.write_all(report.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(msg)) => {
            let _ = writeln!(err, "numeric failure: {msg}");
            EXIT_NUMERIC
        }
    }
}
