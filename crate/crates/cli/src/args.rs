use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nirb_core::fvm::Scheme;
use nirb_core::mesh::{CellPointMode, MeshKind};

// Aliases keep clap from treating these as repeated flags.
pub type FloatList = Vec<f64>;
pub type SizeList = Vec<usize>;

#[derive(Debug, Parser)]
#[command(name = "nirb", version, about = "Finite-volume solvers and two-grid reduced basis studies on the unit square")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print counts and quality measures of a mesh.
    MeshInfo(MeshArgs),
    /// Solve one problem on one mesh.
    Solve(SolveArgs),
    /// Build a reduced basis from a study configuration.
    Offline(OfflineArgs),
    /// Project a coarse solve onto a stored basis.
    Online(OnlineArgs),
    /// Run a convergence study and write study.csv and plot.gp.
    Study(StudyArgs),
    /// Fit the L² order of cell values against the sine solution.
    Superconv(SuperconvArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: MeshKind,
    #[arg(long)]
    pub n: usize,
    /// Cell points; defaults to centroids on uniform meshes and
    /// circumcenters on triangular ones.
    #[arg(long, value_parser = parse_points)]
    pub points: Option<CellPointMode>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long, default_value = "paper")]
    pub problem: String,
    /// Comma-separated parameter, e.g. 0.99,0.8,0.2,0.78 (defaults to that
    /// target for the `paper` problem).
    #[arg(long, value_parser = parse_mu, allow_hyphen_values = true)]
    pub mu: Option<FloatList>,
    #[arg(long, value_parser = parse_scheme, default_value = "tpfa")]
    pub scheme: Scheme,
    /// Write the cell values to this field file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OfflineArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Fine resolution; defaults to the largest in the configuration.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OnlineArgs {
    #[arg(long)]
    pub basis: PathBuf,
    #[arg(long)]
    pub n_coarse: usize,
    #[arg(long, value_parser = parse_mu, allow_hyphen_values = true)]
    pub mu: FloatList,
    #[arg(long)]
    pub out: PathBuf,
    /// Also solve on both meshes and write the relative errors here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SuperconvArgs {
    #[arg(long, value_parser = parse_list, default_value = "8,16,32,64")]
    pub n_list: SizeList,
    #[arg(long, value_parser = parse_scheme, default_value = "tpfa")]
    pub scheme: Scheme,
    #[arg(long, value_parser = parse_kind, default_value = "uniform")]
    pub kind: MeshKind,
    #[arg(long, value_parser = parse_points)]
    pub points: Option<CellPointMode>,
}

fn parse_kind(s: &str) -> Result<MeshKind, String> {
    s.parse().map_err(|e: nirb_core::Error| e.to_string())
}

fn parse_points(s: &str) -> Result<CellPointMode, String> {
    s.parse().map_err(|e: nirb_core::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: nirb_core::Error| e.to_string())
}

fn parse_mu(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}
