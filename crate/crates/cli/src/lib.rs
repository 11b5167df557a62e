//! Campaign drivers behind the `monogamy` binary.
//!
//! Every command writes a report (CSV rows, or one JSON document holding a
//! summary and the rows) and maps its outcome onto an exit status:
//! 0 when every check passed, 1 when a bound was violated, 2 on bad
//! configuration or I/O failure.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use monogamy_core::canonical::decompose_with_certificate;
use monogamy_core::monogamy::{
    corollary_campaign, oracle_campaign, saturation_sweep, theorem_campaign, OracleBudget, SplitSource,
    TheoremSummary,
};
use monogamy_core::tolerance;
use monogamy_core::StateVector;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] monogamy_core::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violation,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
        }
    }

    fn from_violations(count: usize) -> Self {
        if count == 0 {
            Status::Pass
        } else {
            Status::Violation
        }
    }
}

/// Exit status for configuration and I/O errors.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "monogamy", version, about = "Checks of the concurrence / assistance / external entanglement trade-off")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theorem residuals on Haar-random three-qubit pure states.
    VerifyTheorem(TheoremArgs),
    /// Saturating family over a uniform θ grid.
    SweepFamily(SweepArgs),
    /// Canonical-form parameters of a three-qubit state file.
    Canonical(CanonicalArgs),
    /// Mixed-state corollary on random three-qubit density matrices.
    VerifyCorollary(CorollaryArgs),
    /// Convex-roof oracle against the two-qubit closed forms.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Family angle in radians, within [0, π/2].
    #[arg(long = "phi-fam", default_value_t = FRAC_PI_4)]
    pub phi_fam: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CanonicalArgs {
    /// JSON state file: `{"dims": [2, 2, 2], "amplitudes": [[re, im], ...]}`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleBudgetArgs {
    /// Random restarts of the roof optimizer (default depends on the command).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Ensemble size; defaults to rank².
    #[arg(long = "ensemble-size")]
    pub ensemble_size: Option<usize>,
}

impl OracleBudgetArgs {
    fn budget(&self, dims: &[usize]) -> Result<OracleBudget, CliError> {
        let mut budget = OracleBudget::default_for(dims);
        if let Some(r) = self.restarts {
            budget.restarts = r;
        }
        if self.ensemble_size.is_some() {
            budget.ensemble_size = self.ensemble_size;
        }
        if budget.restarts == 0 {
            return Err(CliError::Config("restarts must be at least 1".into()));
        }
        Ok(budget)
    }
}

#[derive(Debug, Args)]
pub struct CorollaryArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[command(flatten)]
    pub budget: OracleBudgetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[command(flatten)]
    pub budget: OracleBudgetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// One report cell.
#[derive(Clone, Debug)]
enum Cell {
    Int(u64),
    Real(f64),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every double.
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Flag(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) => json!(v),
            Cell::Flag(v) => json!(v),
        }
    }
}

struct Report {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
    summary: Value,
    status: Status,
    headline: String,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(out, "{}", cells.join(","));
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut doc = serde_json::to_string_pretty(&json!({ "summary": self.summary, "rows": rows }))
                    .expect("report serializes");
                doc.push('\n');
                doc
            }
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn emit(report: &Report, output: &OutputArgs) -> Result<Status, CliError> {
    write_text(output.out.as_deref(), &report.render(output.format))?;
    if let Some(path) = &output.summary {
        let mut text = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
        text.push('\n');
        write_text(Some(path), &text)?;
    }
    eprintln!("{}", report.headline);
    Ok(report.status)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("summary serializes")
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg.into()))
    }
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    match &cli.command {
        Command::VerifyTheorem(a) => emit(&verify_theorem(a)?, &a.output),
        Command::SweepFamily(a) => emit(&sweep_family(a)?, &a.output),
        Command::Canonical(a) => emit(&canonical(a)?, &a.output),
        Command::VerifyCorollary(a) => emit(&verify_corollary(a)?, &a.output),
        Command::OracleCheck(a) => emit(&oracle_check(a)?, &a.output),
    }
}

fn verify_theorem(a: &TheoremArgs) -> Result<Report, CliError> {
    require(a.samples >= 1, "samples must be at least 1")?;
    let reports = theorem_campaign(a.samples, a.seed)?;
    let summary = TheoremSummary::of(&reports);
    let rows = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                Cell::Int(a.seed),
                Cell::Int(i as u64),
                Cell::Real(r.residual_conc),
                Cell::Real(r.residual_cren),
                Cell::Real(r.residual_neg),
            ]
        })
        .collect();
    Ok(Report {
        header: &["seed", "sample_index", "residual_conc", "residual_cren", "residual_neg"],
        rows,
        summary: json!({ "command": "verify-theorem", "seed": a.seed, "tolerance": tolerance::RESIDUAL, "result": to_value(&summary) }),
        status: Status::from_violations(summary.violations),
        headline: format!(
            "verify-theorem: {} samples, min residual {:e}, {} violations",
            summary.samples,
            summary.min_residual_conc.min(summary.min_residual_cren).min(summary.min_residual_neg),
            summary.violations
        ),
    })
}

fn sweep_family(a: &SweepArgs) -> Result<Report, CliError> {
    require(a.grid >= 2, "grid must be at least 2")?;
    require(
        (0.0..=std::f64::consts::FRAC_PI_2).contains(&a.phi_fam),
        format!("phi-fam {} outside [0, π/2]", a.phi_fam),
    )?;
    let rows = saturation_sweep(a.grid, a.phi_fam)?;
    let violations = rows.iter().filter(|r| r.residual < -tolerance::RESIDUAL).count();
    let max_saturation_gap = rows.iter().map(|r| (r.lhs_conc - 1.0).abs()).fold(0.0, f64::max);
    let max_lhs = rows.iter().map(|r| r.lhs_conc).fold(f64::NEG_INFINITY, f64::max);
    Ok(Report {
        header: &["theta", "phi_fam", "C_AB", "Ca_AB", "C_ext", "lhs_conc", "residual"],
        rows: rows
            .iter()
            .map(|r| {
                [r.theta, r.phi_fam, r.c_ab, r.ca_ab, r.c_ext, r.lhs_conc, r.residual].into_iter().map(Cell::Real).collect()
            })
            .collect(),
        summary: json!({
            "command": "sweep-family",
            "grid": a.grid,
            "phi_fam": a.phi_fam,
            "max_lhs": max_lhs,
            "max_abs_lhs_minus_one": max_saturation_gap,
            "violations": violations,
        }),
        status: Status::from_violations(violations),
        headline: format!("sweep-family: {} rows, max |lhs - 1| {max_saturation_gap:e}, {violations} violations", rows.len()),
    })
}

fn canonical(a: &CanonicalArgs) -> Result<Report, CliError> {
    let text = fs::read_to_string(&a.input).map_err(|source| CliError::Io { path: a.input.clone(), source })?;
    let psi = StateVector::from_json(&text)?;
    if psi.dims() != [2, 2, 2] {
        return Err(CliError::Config(format!("expected a three-qubit state, got dims {:?}", psi.dims())));
    }
    let d = decompose_with_certificate(&psi)?;
    let certified = d.certificate.max_deviation <= tolerance::CERTIFICATE;
    let l = d.params.lambda;
    let mut row: Vec<Cell> = l.iter().copied().map(Cell::Real).collect();
    row.push(Cell::Real(d.params.phi));
    row.push(Cell::Real(d.certificate.max_deviation));
    row.push(Cell::Flag(certified));
    Ok(Report {
        header: &["lambda0", "lambda1", "lambda2", "lambda3", "lambda4", "phi", "max_deviation", "certified"],
        rows: vec![row],
        summary: json!({
            "command": "canonical",
            "params": to_value(&d.params),
            "certificate": to_value(&d.certificate),
            "tolerance": tolerance::CERTIFICATE,
            "certified": certified,
        }),
        status: if certified { Status::Pass } else { Status::Violation },
        headline: format!(
            "canonical: λ = [{:.6}, {:.6}, {:.6}, {:.6}, {:.6}], φ = {:.6}, certificate deviation {:e}",
            l[0], l[1], l[2], l[3], l[4], d.params.phi, d.certificate.max_deviation
        ),
    })
}

fn verify_corollary(a: &CorollaryArgs) -> Result<Report, CliError> {
    require(a.samples >= 1, "samples must be at least 1")?;
    require((1..=8).contains(&a.rank), format!("rank {} outside 1..=8", a.rank))?;
    let budget = a.budget.budget(&[2, 2, 2])?;
    let reports = corollary_campaign(a.samples, a.rank, a.seed, &budget)?;
    let violations = reports.iter().filter(|r| r.violated()).count();
    let min_residual = reports.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let all_converged = reports
        .iter()
        .all(|r| !matches!(r.source, SplitSource::OracleUpperBound { converged: false, .. }));
    let exact = a.rank == 1;
    Ok(Report {
        header: &["seed", "sample_index", "C_AB", "C_C_AB", "lhs", "residual", "exact"],
        rows: reports
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    Cell::Int(a.seed),
                    Cell::Int(i as u64),
                    Cell::Real(r.c_ab),
                    Cell::Real(r.c_split),
                    Cell::Real(r.lhs),
                    Cell::Real(r.residual),
                    Cell::Flag(matches!(r.source, SplitSource::Exact)),
                ]
            })
            .collect(),
        summary: json!({
            "command": "verify-corollary",
            "seed": a.seed,
            "samples": a.samples,
            "rank": a.rank,
            "oracle": { "restarts": budget.restarts, "ensemble_size": budget.ensemble_size, "all_converged": all_converged },
            "tolerance": if exact { tolerance::RESIDUAL } else { tolerance::ORACLE_SLACK },
            "bound_direction": "C(rho_C|AB) is the oracle min-mode value, an upper bound on the roof; the bound term grows with it, so residuals are conservative",
            "min_residual": min_residual,
            "violations": violations,
        }),
        status: Status::from_violations(violations),
        headline: format!("verify-corollary: {} samples, min residual {min_residual:e}, {violations} violations", a.samples),
    })
}

fn oracle_check(a: &OracleArgs) -> Result<Report, CliError> {
    require(a.samples >= 1, "samples must be at least 1")?;
    require((1..=4).contains(&a.rank), format!("rank {} outside 1..=4 for two qubits", a.rank))?;
    let budget = a.budget.budget(&[2, 2])?;
    let rows = oracle_campaign(a.samples, a.rank, a.seed, &budget)?;
    let slack = tolerance::ORACLE_SLACK;
    let max_gap_min = rows.iter().map(|r| (r.oracle_min - r.wootters).abs()).fold(0.0, f64::max);
    let max_gap_max = rows.iter().map(|r| (r.oracle_max - r.sum_mu).abs()).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| r.max_gap() > slack || !r.ordered(slack)).count();
    Ok(Report {
        header: &["seed", "sample_index", "wootters", "oracle_min", "sum_mu", "oracle_max", "negativity"],
        rows: rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = vec![Cell::Int(a.seed), Cell::Int(i as u64)];
                row.extend(
                    [r.wootters, r.oracle_min, r.sum_mu, r.oracle_max, r.negativity].into_iter().map(Cell::Real),
                );
                row
            })
            .collect(),
        summary: json!({
            "command": "oracle-check",
            "seed": a.seed,
            "samples": a.samples,
            "rank": a.rank,
            "oracle": { "restarts": budget.restarts, "ensemble_size": budget.ensemble_size },
            "tolerance": slack,
            "max_abs_min_minus_wootters": max_gap_min,
            "max_abs_max_minus_sum_mu": max_gap_max,
            "violations": violations,
        }),
        status: Status::from_violations(violations),
        headline: format!(
            "oracle-check: {} samples, max gaps {max_gap_min:e} (min) {max_gap_max:e} (max), {violations} violations",
            a.samples
        ),
    })
}
