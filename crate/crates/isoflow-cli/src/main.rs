//! Command-line front end: chart inspection, flow evolution, verification
//! suites, and QR iteration.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input or chart error,
//! 3 numeric overflow.

mod evolve;
mod io;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use io::Failure;
use isoflow::charts::{chart_decompose, charts_containing, jacobi_detect, ChartPoint};
use isoflow::extended::{qr_step, toda_log_time1};
use isoflow::linalg::real_eigen;
use isoflow::Matrix;
use serde::Serialize;
use std::path::PathBuf;
use std::process;

#[derive(Parser)]
#[command(name = "isoflow", about = "Isospectral flows in linearizing chart coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the charts containing a matrix, with its coordinates in each
    Decompose(DecomposeArgs),
    /// Sample a flow trajectory with per-sample invariant diagnostics
    Evolve(EvolveArgs),
    /// Run a named cross-validation suite
    Verify(VerifyArgs),
    /// Iterate the QR step, reporting subdiagonal norms
    Qrstep(QrstepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FlowKind {
    /// isospectral flow driven by p applied to the matrix itself
    Toda,
    /// singular-value flow driven by p and q on the two squares
    Svd,
    /// frame rotation generated by a fixed lower triangular C (Y frozen)
    Ext19,
    /// triangular shear generated by C (frame frozen)
    Ext20,
    /// conjugation by the orthogonal factor of exp(tX)
    Sts,
}

impl FlowKind {
    pub fn label(&self) -> &'static str {
        match self {
            FlowKind::Toda => "toda",
            FlowKind::Svd => "svd",
            FlowKind::Ext19 => "ext19",
            FlowKind::Ext20 => "ext20",
            FlowKind::Sts => "sts",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteKind {
    Roundtrip,
    Toda,
    Svd,
    Ext,
    Qrstep,
    Straightline,
}

impl SuiteKind {
    pub fn label(&self) -> &'static str {
        match self {
            SuiteKind::Roundtrip => "roundtrip",
            SuiteKind::Toda => "toda",
            SuiteKind::Svd => "svd",
            SuiteKind::Ext => "ext",
            SuiteKind::Qrstep => "qrstep",
            SuiteKind::Straightline => "straightline",
        }
    }
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Input matrix: a JSON file path, or the JSON itself
    #[arg(long)]
    input: String,
    /// Restrict to one chart, as a one-based image list like 2,1,3
    #[arg(long)]
    perm: Option<String>,
    /// Tolerance for the symmetric / upper-triangular classification
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvolveArgs {
    #[arg(value_enum)]
    pub flow: FlowKind,
    /// Input matrix: a JSON file path, or the JSON itself
    #[arg(long)]
    pub input: String,
    /// Generator matrix (C for ext19/ext20, X for sts); JSON path or inline.
    /// Defaults: C = 0, X = log of the input.
    #[arg(long)]
    pub gen: Option<String>,
    /// Chart permutation(s), one-based; svd takes "left;right"
    #[arg(long)]
    pub perm: Option<String>,
    /// Flow function: id | exp | log | poly:c0,c1,... or a schedule
    /// of semicolon-separated "(duration)spec" segments
    #[arg(long, default_value = "id")]
    pub p: String,
    /// Second function for the svd flow (same syntax as --p)
    #[arg(long, default_value = "id")]
    pub q: String,
    /// Time horizon
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Oracle integration step
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Number of sample times, evenly spaced over [0, t]
    #[arg(long, default_value_t = 11)]
    pub samples: usize,
    /// Integrate the defining equation instead of evaluating the closed form
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Case count, where the suite repeats over random draws
    #[arg(long)]
    pub samples: Option<usize>,
    /// Oracle integration step
    #[arg(long)]
    pub h: Option<f64>,
    /// Override every check's tolerance
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args)]
pub struct QrstepArgs {
    /// Input matrix: a JSON file path, or the JSON itself
    #[arg(long)]
    input: String,
    /// Number of QR steps to take
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Also check each step against the time-1 log flow
    #[arg(long)]
    crosscheck: bool,
    /// Crosscheck tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Evolve(args) => evolve::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Qrstep(args) => cmd_qrstep(args),
    };
    match result {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            process::exit(failure.code());
        }
    }
}

#[derive(Serialize)]
struct ChartReport {
    perm: Vec<usize>,
    diag: Vec<f64>,
    y: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    symmetric: bool,
    upper_triangular: bool,
    jacobi: bool,
}

#[derive(Serialize)]
struct DecomposeReport {
    n: usize,
    spectrum: Vec<f64>,
    charts: Vec<ChartReport>,
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<(), Failure> {
    if matches!(args.format, Format::Csv) {
        return Err(Failure::Input("decompose reports are json only".to_string()));
    }
    let m = io::read_matrix(&args.input)?;
    let tol = io::tolerance(args.tol, 1e-12)?;
    let perms = match &args.perm {
        Some(spec) => vec![io::parse_perm(spec, m.n())?],
        None => charts_containing(&m)?,
    };
    let (spectrum, _) = real_eigen(&m)?;
    let scale = m.max_abs().max(1.0);
    let charts = perms
        .into_iter()
        .map(|pi| {
            let point = chart_decompose(&m, &pi)?;
            Ok(chart_report(&point, tol * scale))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let report = DecomposeReport { n: m.n(), spectrum: spectrum.values().to_vec(), charts };
    io::write_out(&args.output, &io::to_pretty_json(&report))
}

fn chart_report(point: &ChartPoint, tol: f64) -> ChartReport {
    ChartReport {
        perm: point.pi().one_based_images(),
        diag: (0..point.n()).map(|i| point.lambda(i)).collect(),
        y: point.y().rows(),
        z: point.z().rows(),
        symmetric: point.y().max_abs() <= tol,
        upper_triangular: point.z().max_abs() <= tol,
        jacobi: jacobi_detect(point),
    }
}

#[derive(Serialize)]
struct QrIterate {
    k: usize,
    state: Vec<Vec<f64>>,
    subdiag_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    crosscheck_gap: Option<f64>,
}

#[derive(Serialize)]
struct QrReport {
    n: usize,
    steps: usize,
    crosscheck: bool,
    iterates: Vec<QrIterate>,
}

fn subdiag_norm(m: &Matrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.n() {
        for j in 0..i {
            sum += m[(i, j)] * m[(i, j)];
        }
    }
    sum.sqrt()
}

fn cmd_qrstep(args: &QrstepArgs) -> Result<(), Failure> {
    let m0 = io::read_matrix(&args.input)?;
    let tol = io::tolerance(args.tol, 1e-8)?;
    let mut iterates = vec![QrIterate {
        k: 0,
        state: m0.rows(),
        subdiag_norm: subdiag_norm(&m0),
        crosscheck_gap: None,
    }];
    let mut current = m0;
    let mut worst_gap: Option<f64> = None;
    for k in 1..=args.samples {
        let next = qr_step(&current)?;
        let gap = if args.crosscheck {
            let via_flow = toda_log_time1(&current)?;
            let gap = (&via_flow - &next).max_abs();
            worst_gap = Some(worst_gap.unwrap_or(0.0).max(gap));
            Some(gap)
        } else {
            None
        };
        iterates.push(QrIterate {
            k,
            state: next.rows(),
            subdiag_norm: subdiag_norm(&next),
            crosscheck_gap: gap,
        });
        current = next;
    }
    let report =
        QrReport { n: current.n(), steps: args.samples, crosscheck: args.crosscheck, iterates };
    let text = match args.format {
        Format::Json => io::to_pretty_json(&report),
        Format::Csv => {
            let n = report.n;
            let mut header = vec!["k".to_string()];
            for i in 1..=n {
                for j in 1..=n {
                    header.push(format!("m_{i}_{j}"));
                }
            }
            header.push("subdiag_norm".to_string());
            let mut out = header.join(", ");
            out.push('\n');
            for it in &report.iterates {
                let mut row = vec![it.k.to_string()];
                for line in &it.state {
                    row.extend(line.iter().map(|&x| io::fmt16(x)));
                }
                row.push(io::fmt16(it.subdiag_norm));
                out.push_str(&row.join(", "));
                out.push('\n');
            }
            out
        }
    };
    io::write_out(&args.output, &text)?;
    match worst_gap {
        Some(gap) if gap > tol => Err(Failure::Check(format!(
            "qr step and time-1 log flow disagree by {gap:.3e} (tolerance {tol:.3e})"
        ))),
        _ => Ok(()),
    }
}
