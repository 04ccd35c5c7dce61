use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Disk harmonic analysis of open surfaces and rough caps.
///
/// Every subcommand prints a JSON summary on stdout. Exit status: 0 success,
/// 2 usage error, 3 invalid input mesh or file, 4 numerical or geometric failure.
/// Set DHKIT_THREADS to bound the worker pool used by batch runs.
#[derive(Parser, Debug)]
#[command(name = "dhkit", version)]
pub struct Cli {
    /// JSON file with default values for the subcommand's flags (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write the summary to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a periodic self-affine height grid.
    Generate(GenerateArgs),
    /// Area-preserving disk parameterisation of an open mesh.
    Param(ParamArgs),
    /// Disk harmonic coefficients and shape descriptors.
    Analyze(AnalyzeArgs),
    /// m = 0 spectrum and Hurst exponent fit.
    Hurst(HurstArgs),
    /// Truncated reconstructions and their error against a reference.
    Reconstruct(ReconstructArgs),
    /// Wrap a flat rough patch onto a spherical cap.
    Project(ProjectArgs),
    /// generate, sample, analyze and fit in one go.
    Pipeline(PipelineArgs),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SurfaceArgs {
    /// Hurst exponent in (0, 1).
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub hurst: Option<f64>,
    /// Roll-off wavevector [default: 0].
    #[arg(long)]
    pub qr: Option<f64>,
    /// Lower wavevector of the power-law range [default: 4].
    #[arg(long)]
    pub ql: Option<f64>,
    /// Cut-off wavevector [default: n/2].
    #[arg(long)]
    pub qs: Option<f64>,
    /// Target rms height [default: 1].
    #[arg(long)]
    pub rms: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid size, a power of two [default: 512].
    #[arg(long)]
    pub n: Option<usize>,
    /// Multiply spectral amplitudes by Rayleigh noise.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub rayleigh: bool,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    /// Output prefix; writes PREFIX.bin, PREFIX.json and PREFIX.obj [default: surface].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the OBJ export.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub no_obj: bool,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ParamArgs {
    /// Input mesh (OBJ or PLY).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Output CSV [default: param.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Beltrami magnitude cap in (0, 1) [default: 0.95].
    #[arg(long)]
    pub tau_cap: Option<f64>,
    /// Maximum density-flow iterations [default: 500].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Density-flow stopping tolerance on the density CV [default: 0.01].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// Highest degree of the expansion.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// neumann or dirichlet [default: neumann].
    #[arg(long)]
    pub bc: Option<String>,
    /// uniform or disk-area sample weights [default: uniform].
    #[arg(long)]
    pub weighting: Option<String>,
    /// auto, qr or normal [default: auto].
    #[arg(long)]
    pub solver: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    /// Input mesh (OBJ or PLY).
    #[arg(long, conflicts_with = "grid")]
    pub mesh: Option<PathBuf>,
    /// Disk parameterisation CSV of the mesh; computed when absent.
    #[arg(long)]
    pub param: Option<PathBuf>,
    /// Height grid (.bin with .json sidecar); its inscribed circular patch is analysed.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// With --grid, use the whole square mapped onto the disk frame.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub square: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// Coefficient JSON output [default: coeffs.json].
    #[arg(long)]
    pub coeffs_out: Option<PathBuf>,
    /// Descriptor CSV output [default: descriptors.csv].
    #[arg(long)]
    pub descriptors_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HurstArgs {
    /// Coefficient JSON from `analyze`.
    #[arg(long, conflicts_with_all = ["spectrum", "grid"])]
    pub coeffs: Option<PathBuf>,
    /// Spectrum CSV (k,lambda,psd,included_in_fit).
    #[arg(long, conflicts_with = "grid")]
    pub spectrum: Option<PathBuf>,
    /// Height grid to sample and analyse.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// With --grid: number of random circular patches (batch mode).
    #[arg(long)]
    pub patches: Option<usize>,
    /// Patch radius in grid nodes [default: n/4 - 0.5].
    #[arg(long)]
    pub patch_radius: Option<f64>,
    /// Seed for patch placement [default: 0].
    #[arg(long)]
    pub patch_seed: Option<u64>,
    /// With --grid: analyse the whole square instead of the inscribed circle.
    #[arg(long, conflicts_with = "patches")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub square: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// x, y, z or normalized [default: z].
    #[arg(long)]
    pub axis: Option<String>,
    /// First degree of the fit [default: 2].
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Last degree of the fit [default: 70, or the coefficient order].
    #[arg(long)]
    pub fit_max: Option<usize>,
    /// Relative PSD floor below which points are left out [default: 1e-8].
    #[arg(long)]
    pub floor: Option<f64>,
    /// Fit summary JSON [default: fit.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Spectrum CSV output [default: spectrum.csv]; in batch mode a directory.
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReconstructArgs {
    /// Coefficient JSON from `analyze`.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Comma-separated truncation degrees [default: the coefficient order].
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Edge length of the uniform disk mesh [default: 0.025].
    #[arg(long)]
    pub edge: Option<f64>,
    /// Reference mesh for the error report.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Report the larger of both one-directional errors.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub symmetric: bool,
    /// Output prefix; writes PREFIX_k<K>.obj [default: recon].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Error report CSV (k,rmse) [default: PREFIX_report.csv].
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ProjectArgs {
    /// Flat patch mesh in unit-disk coordinates with heights in z.
    #[arg(long, conflicts_with = "grid")]
    pub patch: Option<PathBuf>,
    /// Height grid whose inscribed patch is projected.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Cap half-angle in degrees.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Sphere radius [default: 1].
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Curved mesh output [default: cap.obj].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Disk parameterisation CSV of the curved mesh, for `analyze --param`.
    #[arg(long)]
    pub param_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    /// Analyse the whole square instead of the inscribed circle.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub square: bool,
    /// Highest degree of the expansion [default: 70].
    #[arg(long)]
    pub kmax: Option<usize>,
    /// First degree of the fit [default: 2].
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Last degree of the fit [default: kmax].
    #[arg(long)]
    pub fit_max: Option<usize>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
