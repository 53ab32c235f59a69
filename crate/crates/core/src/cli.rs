//! Command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 checks ran and some failed, 2 usage or
//! validation error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::linalg::ComplexMatrix;
use crate::polynomials::{family_member, Family};
use crate::projections::{
    halmos_decompose, read_pair_json, universal_pair_approx, write_pair_json, PairFile,
    ProjectionError, ProjectionPair, PROJ_TOL,
};
use crate::verify::{
    bound_sequences, eq2_counterexample, eq2_counterexample_search, eq2_violation, run_trials,
    CampaignConfig, CampaignReport, CheckKind, DEFAULT_M_MAX, DEFAULT_N_MAX, DEFAULT_TOL,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Caps the number of campaign worker threads.
pub const THREADS_ENV: &str = "PROJPAIR_THREADS";

const MAX_PQF_INDEX: usize = 200;
const MAX_AB_INDEX: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "projpair", version, about = "Verify norm identities for pairs of projections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Deterministic,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a randomized verification campaign.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Comma-separated matrix dimensions.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        dims: Vec<usize>,
        /// Random pairs per dimension.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Highest power for the expansion and block checks.
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Highest power for the product-power check.
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: usize,
        /// Comma-separated subset of checks (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the coefficients of one polynomial family member.
    Poly {
        /// P, Q, F, A or B.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block-decompose a pair read from a JSON pair file.
    #[command(allow_negative_numbers = true)]
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10.0 * PROJ_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the upper and lower bound sequences at a = ‖fg‖.
    #[command(allow_negative_numbers = true)]
    Bounds {
        #[arg(long)]
        a: f64,
        #[arg(long = "max-n")]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a pair violating the 2x2 commutator identity.
    Counterexample {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = SearchMode::Deterministic)]
        mode: SearchMode,
        /// Samples in random mode.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the pair file; embedded in the report when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms of the angle-grid approximant of the universal pair.
    #[command(allow_negative_numbers = true)]
    Universal {
        /// Grid size K.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What went wrong, mapped onto the exit-code contract.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ProjectionError> for CliError {
    fn from(e: ProjectionError) -> Self {
        match e {
            ProjectionError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<crate::verify::VerifyError> for CliError {
    fn from(e: crate::verify::VerifyError) -> Self {
        match e {
            crate::verify::VerifyError::Projection(p) => p.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, threads: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(cli.command, threads, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

/// Entry point used by the binary: real argv, the threads variable, and stdio.
pub fn main_from_env() -> i32 {
    let threads = std::env::var(THREADS_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(
        std::env::args_os(),
        threads.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

fn parse_threads(raw: Option<&str>) -> Result<Option<usize>, CliError> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!("--tol must be a finite nonnegative number, got {tol}")))
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn dispatch(command: Command, threads: Option<&str>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Verify {
            dims,
            trials,
            seed,
            tol,
            n_max,
            m_max,
            checks,
            format,
            out,
        } => {
            check_tol(tol)?;
            let threads = parse_threads(threads)?;
            if dims.is_empty() || dims.contains(&0) {
                return Err(usage("--dims must list positive integers"));
            }
            if n_max == 0 || m_max == 0 {
                return Err(usage("--n-max and --m-max must be at least 1"));
            }
            let checks = if checks.is_empty() {
                CheckKind::ALL.to_vec()
            } else {
                checks
                    .iter()
                    .map(|c| CheckKind::parse(c).ok_or_else(|| usage(format!("unknown check {c:?}"))))
                    .collect::<Result<_, _>>()?
            };
            let config = CampaignConfig {
                dims,
                trials_per_dim: trials,
                base_seed: seed,
                tol,
                n_max,
                m_max,
                checks,
            };
            let report = run_trials(&config, threads)?;
            let text = match format {
                OutputFormat::Json => report.to_json() + "\n",
                OutputFormat::Csv => campaign_csv(&report),
            };
            emit(out.as_deref(), stdout, &text)?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Poly { family, n, out } => {
            let family =
                Family::parse(&family).ok_or_else(|| usage(format!("unknown family {family:?}; use P, Q, F, A or B")))?;
            let max = match family {
                Family::A | Family::B => MAX_AB_INDEX,
                _ => MAX_PQF_INDEX,
            };
            if n < family.first_index() || n > max {
                return Err(usage(format!(
                    "--n for family {family} must be in [{}, {max}]",
                    family.first_index()
                )));
            }
            let member = family_member(family, n).map_err(|e| usage(e.to_string()))?;
            let report = json!({
                "family": family.to_string(),
                "n": n,
                "coefficients": member.polynomial.to_decimal_strings(),
                "closed_form_agrees": member.forms_agree,
            });
            emit(out.as_deref(), stdout, &to_json(&report))?;
            Ok(if member.forms_agree { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Decompose { input, tol, out } => {
            check_tol(tol)?;
            let pair = read_pair_json(&input)?;
            decompose_report(&pair, tol, out.as_deref(), stdout)
        }
        Command::Bounds { a, max_n, format, out } => {
            if !(0.0..=1.0).contains(&a) {
                return Err(usage(format!("--a must be in [0, 1], got {a}")));
            }
            if max_n == 0 {
                return Err(usage("--max-n must be at least 1"));
            }
            let table = bound_sequences(a, max_n)?;
            let text = match format {
                OutputFormat::Json => to_json(&json!({
                    "a": table.a,
                    "limit": table.limit,
                    "rows": table.rows,
                    "final_upper_gap": table.final_upper_gap(),
                    "final_lower_gap": table.final_lower_gap(),
                    "invariants_hold": table.invariants_hold(),
                })),
                OutputFormat::Csv => csv_text(
                    &["n", "upper", "lower", "limit", "upper_gap", "lower_gap"],
                    table
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                num(r.upper),
                                num(r.lower),
                                num(table.limit),
                                num(r.upper - table.limit),
                                num(table.limit - r.lower),
                            ]
                        })
                        .collect(),
                ),
            };
            emit(out.as_deref(), stdout, &text)?;
            Ok(if table.invariants_hold() { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Counterexample {
            dim,
            mode,
            budget,
            seed,
            out,
        } => {
            if dim < 4 || dim % 2 != 0 {
                return Err(usage(format!("--dim must be an even integer >= 4, got {dim}")));
            }
            let (pair, violation, mut report) = match mode {
                SearchMode::Deterministic => {
                    let (pair, violation) = eq2_counterexample(dim)?;
                    (pair, violation, json!({ "mode": "deterministic" }))
                }
                SearchMode::Random => {
                    if budget == 0 {
                        return Err(usage("--budget must be positive"));
                    }
                    let s = eq2_counterexample_search(dim, budget, seed)?;
                    let extra = json!({
                        "mode": "random",
                        "seed": seed,
                        "budget": s.trials,
                        "violating_trials": s.violating_trials,
                    });
                    (s.pair, s.violation, extra)
                }
            };
            let (_, norm_fg, norm_comm) = eq2_violation(&pair)?;
            let obj = report.as_object_mut().expect("object");
            obj.insert("dim".into(), json!(dim));
            obj.insert("violation".into(), json!(violation));
            obj.insert("norm_fg".into(), json!(norm_fg));
            obj.insert("norm_comm".into(), json!(norm_comm));
            match &out {
                Some(path) => {
                    write_pair_json(&pair, path)?;
                    obj.insert("pair_file".into(), json!(path.display().to_string()));
                }
                None => {
                    obj.insert("pair".into(), serde_json::to_value(PairFile::from_pair(&pair)).expect("pair"));
                }
            }
            emit(None, stdout, &to_json(&report))?;
            Ok(if violation > 0.0 { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Universal { k, tol, format, out } => {
            check_tol(tol)?;
            if k < 2 {
                return Err(usage(format!("--k must be at least 2, got {k}")));
            }
            let cells = universal_pair_approx(k)?;
            let n = cells.norms()?;
            let predicted = n.norm_fg + n.norm_fg * n.norm_fg;
            let residual = (n.norm_anti - predicted).abs();
            let pass = residual <= tol;
            let text = match format {
                OutputFormat::Json => to_json(&json!({
                    "grid_size": k,
                    "cells": cells.angles.len(),
                    "norm_pq": n.norm_fg,
                    "norm_comm": n.norm_comm,
                    "norm_anti": n.norm_anti,
                    "predicted": predicted,
                    "theorem_residual": residual,
                    "tol": tol,
                    "pass": pass,
                })),
                OutputFormat::Csv => csv_text(
                    &["grid_size", "cells", "norm_pq", "norm_comm", "norm_anti", "theorem_residual", "pass"],
                    vec![vec![
                        k.to_string(),
                        cells.angles.len().to_string(),
                        num(n.norm_fg),
                        num(n.norm_comm),
                        num(n.norm_anti),
                        num(residual),
                        pass.to_string(),
                    ]],
                ),
            };
            emit(out.as_deref(), stdout, &text)?;
            Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn campaign_csv(report: &CampaignReport) -> String {
    csv_text(
        &["check", "trials", "max_residual", "failures", "verdict"],
        report
            .per_check
            .iter()
            .map(|s| {
                vec![
                    s.name.clone(),
                    s.trials.to_string(),
                    num(s.max_residual),
                    s.failures.len().to_string(),
                    if s.failures.is_empty() { "pass" } else { "fail" }.to_string(),
                ]
            })
            .collect(),
    )
}

#[derive(Serialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn decompose_report(
    pair: &ProjectionPair,
    tol: f64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    match halmos_decompose(pair, tol) {
        Ok(h) => {
            let report = json!({
                "dim": pair.dim(),
                "rank_f": h.rank(),
                "d": MatrixJson::from(&h.d),
                "d_prime": MatrixJson::from(&h.d_prime),
                "v": MatrixJson::from(&h.v),
                "residuals": h.residuals,
                "norm_fg": h.norm_fg,
                "norm_fg_squared": h.norm_fg * h.norm_fg,
                "norm_d": h.norm_d,
                "tol": tol,
                "pass": true,
            });
            emit(out, stdout, &to_json(&report))?;
            Ok(EXIT_PASS)
        }
        Err(ProjectionError::RelationsViolated { residuals }) => {
            let report = json!({
                "dim": pair.dim(),
                "residuals": residuals,
                "tol": tol,
                "pass": false,
            });
            emit(out, stdout, &to_json(&report))?;
            Ok(EXIT_CHECK_FAILED)
        }
        Err(e) => Err(e.into()),
    }
}
