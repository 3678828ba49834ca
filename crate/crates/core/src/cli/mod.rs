//! Command-line front end. Every subcommand builds one CSV table; summaries
//! go to standard error.
//!
//! Exit status: `0` on success, `2` for invalid input, `3` for numerical failure.

mod commands;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use table::{format_real, Cell, PlotSpec, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "toepfrac", version, about = "Fractional derivatives and integrals as limits of Toeplitz sections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// CSV destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write `<out>.plt`, a gnuplot script reading the CSV. Requires `--out`.
    #[arg(long, global = true)]
    pub gnuplot: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbol Fourier coefficients: series, FFT and the asymptotic law.
    Coeffs(CoeffsArgs),
    /// Grid derivative rows against their quadrature or closed-form limit.
    Deriv(DerivArgs),
    /// Inverse-row integrals against the closed-form limit.
    Integ(IntegArgs),
    /// Wiener–Hopf inversion versus dense solves.
    InvertCheck(InvertArgs),
    /// Dirichlet problem `D_α y = ψ` for an order with even integer part.
    Solve(SolveArgs),
    /// Whole-line operators for compactly supported functions.
    Line(LineArgs),
    /// Error and observed order over an N-sweep.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Lower,
    Upper,
    Gl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DerivMethod {
    /// Lower symbol row.
    Grid,
    /// Upper symbol row.
    Upper,
    /// Grünwald–Letnikov difference.
    Gl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvergeOp {
    Deriv,
    Gl,
    Integ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    Fast,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Lower)]
    pub variant: VariantArg,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// FFT grid size (power of two); defaults to the larger of 2^14 and 8·n-max.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DerivArgs {
    /// Order; values above 1 use the composite rule `D^{α'+n} = 2^n D_{α'}(f^{(n)})`.
    #[arg(long)]
    pub alpha: f64,
    /// Registry id: const:c, poly:c0,c1,..., pow:b, bridge, bump:c,w, tent:c,w, sinpi, t, zero.
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub x: Vec<f64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "256,1024,4096")]
    pub n: Vec<usize>,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = DerivMethod::Grid)]
    pub method: DerivMethod,
    /// Quadrature tolerance for the oracle.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct IntegArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub x: Vec<f64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "256,512,1024")]
    pub n: Vec<usize>,
    #[arg(long = "R", value_delimiter = ',', default_value = "1")]
    pub r: Vec<f64>,
    /// Add a Richardson column combining each N with N/2 at rate α.
    #[arg(long)]
    pub extrapolate: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7")]
    pub alpha: Vec<f64>,
    #[arg(long = "R", value_delimiter = ',', default_value = "0.5,0.9,0.95")]
    pub r: Vec<f64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "8,32,64")]
    pub n: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 2.5)]
    pub alpha: f64,
    #[arg(long = "fn", default_value = "const:1")]
    pub function: String,
    #[arg(long = "N", default_value_t = 512)]
    pub n: usize,
    /// Add the double-integral form and its uncalibrated-prefactor variant per node.
    #[arg(long = "paper-literal")]
    pub literal: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Fast)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct LineArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "fn", default_value = "bump:0,1")]
    pub function: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.5,0,0.5")]
    pub x: Vec<f64>,
    /// Half-widths A of finite intervals [-A, A] compared with the whole-line value.
    #[arg(long = "A", value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub x: Vec<f64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "64,128,256,512,1024,2048,4096")]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ConvergeOp::Deriv)]
    pub op: ConvergeOp,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// Failure classified by exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// A finished table with its plot layout and summary lines.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub plot: PlotSpec,
    pub summary: Vec<String>,
}

/// Evaluates a subcommand without touching the filesystem.
pub fn evaluate(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Deriv(a) => commands::deriv(a),
        Command::Integ(a) => commands::integ(a),
        Command::InvertCheck(a) => commands::invert_check(a),
        Command::Solve(a) => commands::solve(a),
        Command::Line(a) => commands::line(a),
        Command::Converge(a) => commands::converge(a),
    }
}

pub fn run(command: &Command, output: &Output) -> i32 {
    if output.gnuplot && output.out.is_none() {
        eprintln!("invalid input: --gnuplot requires --out");
        return EXIT_VALIDATION;
    }
    let report = match evaluate(command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let plot = output.gnuplot.then_some(&report.plot);
    if let Err(e) = table::write_files(&report.table, output.out.as_deref(), plot) {
        eprintln!("invalid input: cannot write output: {e}");
        return EXIT_VALIDATION;
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    EXIT_OK
}

/// Parses `std::env::args` and runs; returns the process exit status.
pub fn main_from_env() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli.command, &cli.output),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
