mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvegraph::MeasureMode;

#[derive(Parser, Debug)]
#[command(name = "curvegraph", version, about = "Curvature, spectra and isoperimetry of weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph from a built-in family.
    Generate(GenerateArgs),
    /// Eigenvalues of the μ-Laplacian.
    Spectrum(SpectrumArgs),
    /// Per-vertex curvature K(x, n) and CD(K, n) status.
    Curvature(CurvatureArgs),
    /// Exact k-way isoperimetric constant with witness sets.
    Isoperimetry(IsoperimetryArgs),
    /// Apply the heat semigroup P_t to a function.
    Heat(HeatArgs),
    /// Cartesian product of two graph files.
    Product(ProductArgs),
    /// Run the bounds ledger; exits 1 when any entry fails.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FamilyName {
    Cycle,
    Path,
    Complete,
    Hypercube,
    Cayley,
    Dumbbell,
    Triangle,
    Tetrahedron,
    Mimura,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct GraphInput {
    /// Graph file in curvegraph/1 JSON.
    pub graph: PathBuf,
    /// Replace the measure stored in the file.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Option<MeasureMode>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: FamilyName,
    /// Vertex count (cycle, path, complete) or clique size (dumbbell, mimura).
    #[arg(long)]
    pub n: Option<usize>,
    /// Hypercube dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Cayley group orders, comma separated (e.g. `3,5`).
    #[arg(long, value_delimiter = ',')]
    pub orders: Vec<usize>,
    /// Cayley generators as `;`-separated tuples (e.g. `1,0;0,1`). Defaults to the unit vectors.
    #[arg(long)]
    pub generators: Option<String>,
    /// Edge weights of the triangle or tetrahedron.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// unit, degree, constant:<c> or explicit:<m1,m2,...>.
    #[arg(long, value_parser = parse_measure, default_value = "unit")]
    pub measure: MeasureMode,
    /// Output file; stdout when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Only report λ_1..λ_k.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Dimension n, a positive number or `inf`.
    #[arg(long, default_value = "inf")]
    pub n: curvegraph::Dimension,
    /// Curvature bound to test.
    #[arg(long = "K", default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Restrict to one vertex id.
    #[arg(long)]
    pub vertex: Option<String>,
    /// Include minimizing witness functions.
    #[arg(long)]
    pub witness: bool,
    /// Relative PSD tolerance.
    #[arg(long, default_value_t = curvegraph::curvature::PSD_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct IsoperimetryArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value = "subpartition")]
    pub mode: curvegraph::isoperimetry::Mode,
    /// Maximum number of assignments the search may cover.
    #[arg(long, default_value_t = curvegraph::isoperimetry::DEFAULT_BUDGET)]
    pub budget: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct HeatArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Time t ≥ 0.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Function as a JSON array in vertex order or an object keyed by vertex id.
    /// A seeded random function is used when omitted.
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long, default_value_t = curvegraph::bounds::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Measure of the product graph.
    #[arg(long, value_parser = parse_measure, default_value = "unit")]
    pub measure: MeasureMode,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 4)]
    pub k_max: usize,
    #[arg(long, default_value_t = curvegraph::bounds::DEFAULT_SEED)]
    pub seed: u64,
    /// Run curvature-gated checks even without a certificate (as report-only).
    #[arg(long)]
    pub force: bool,
    /// Relative tolerance for pass/fail grading.
    #[arg(long, default_value_t = curvegraph::bounds::DEFAULT_TOL)]
    pub tol: f64,
    /// Number of sampled set pairs for the concentration checks.
    #[arg(long, default_value_t = 4)]
    pub pairs: usize,
    /// Genus bound enabling the genus-dependent ratio report.
    #[arg(long)]
    pub genus: Option<f64>,
    /// Add the d_G/2 ≤ h₃/h₂ entry (for K_N × K_2).
    #[arg(long)]
    pub mimura: bool,
    /// Budget for the exact multi-way searches.
    #[arg(long, default_value_t = 1e7)]
    pub budget: f64,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// `unit`, `degree`, `constant:<c>` or `explicit:<m1,m2,...>`.
pub fn parse_measure(s: &str) -> Result<MeasureMode, String> {
    let (head, tail) = match s.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (s, None),
    };
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    match (head, tail) {
        ("unit", None) => Ok(MeasureMode::Unit),
        ("degree", None) => Ok(MeasureMode::Degree),
        ("constant", Some(c)) => Ok(MeasureMode::Constant(number(c)?)),
        ("constant", None) => Err("use constant:<value>".into()),
        ("explicit", Some(list)) => Ok(MeasureMode::Explicit(
            list.split(',').map(number).collect::<Result<_, _>>()?,
        )),
        ("explicit", None) => Err("use explicit:<m1,m2,...>".into()),
        _ => Err(format!(
            "unknown measure `{s}`; expected unit, degree, constant:<c> or explicit:<values>"
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Curvature(args) => commands::curvature(args),
        Command::Isoperimetry(args) => commands::isoperimetry(args),
        Command::Heat(args) => commands::heat(args),
        Command::Product(args) => commands::product(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
