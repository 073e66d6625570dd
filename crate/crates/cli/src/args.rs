use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mid",
    version,
    about = "Multivariate isolate-detect change-point detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect change-points in a CSV panel (rows = time, columns = components).
    Detect(DetectArgs),
    /// Run the simulation harness and write a table of results.
    Simulate(SimulateArgs),
    /// Tune threshold constants on pure-noise panels.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    /// Piecewise-constant mean.
    Mean,
    /// Continuous piecewise-linear signal with slope changes.
    Slope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2,
    Linf,
    Auto,
    PermL2,
    PermLinf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlainNormArg {
    L2,
    Linf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    /// Estimate each component's scale from its differenced series.
    Mad,
    /// Assume unit noise variance.
    None,
    /// Read per-component scales from `--sigma-file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// The 18 mean-change settings.
    PaperS1,
    /// The 27 slope-change settings.
    PaperS2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchSigmaArg {
    /// Use simulated panels as generated.
    Known,
    /// Divide each component by its MAD estimate first.
    Mad,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Input CSV; `-` reads standard input.
    #[arg(required_unless_present = "dump_thresholds")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mean")]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub norm: NormArg,
    /// Level of the tabulated threshold constants: 0.05 or 0.10.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Expansion step of the interval grid.
    #[arg(long, default_value_t = mid_core::DEFAULT_LAMBDA)]
    pub lambda: usize,
    #[arg(long, value_enum, default_value = "mad")]
    pub sigma: SigmaArg,
    /// Per-component scales, separated by commas or whitespace.
    #[arg(long)]
    pub sigma_file: Option<PathBuf>,
    /// Apply 2 sqrt(x + 3/8) to count data before scaling.
    #[arg(long)]
    pub anscombe: bool,
    /// Seed for the permutation variants.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Replaces the tabulated threshold constant.
    #[arg(long)]
    pub threshold_constant: Option<f64>,
    #[arg(long, default_value_t = mid_core::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = mid_core::DEFAULT_PERMUTATION_ALPHA)]
    pub perm_alpha: f64,
    /// Level of the univariate constants used to estimate sparsity
    /// (defaults to `--alpha`).
    #[arg(long)]
    pub sparsity_alpha: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the embedded threshold constants and exit.
    #[arg(long)]
    pub dump_thresholds: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Use a predefined grid instead of the grid flags.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long, value_enum, default_value = "mean")]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 1500)]
    pub length: usize,
    #[arg(long, value_delimiter = ',', default_value = "30")]
    pub dims: Vec<usize>,
    /// Numbers of change-points.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub changes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub sparsity: Vec<f64>,
    /// Bounds of the uniform change sizes, as `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 2.0])]
    pub magnitude: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub noise_sd: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: NormArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = mid_core::DEFAULT_LAMBDA)]
    pub lambda: usize,
    #[arg(long, value_enum, default_value = "known")]
    pub sigma: BenchSigmaArg,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = mid_core::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = mid_core::DEFAULT_PERMUTATION_ALPHA)]
    pub perm_alpha: f64,
    /// Write the CSV table here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the human-readable table to standard output.
    #[arg(long)]
    pub table: bool,
    /// Add a mean runtime column to the CSV.
    #[arg(long)]
    pub timing: bool,
    /// Also write the first replicate's panel of the first cell as CSV.
    #[arg(long)]
    pub panel_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, value_enum, default_value = "mean")]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "linf")]
    pub norm: PlainNormArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Series lengths of the null panels.
    #[arg(long, value_delimiter = ',', default_values_t = [700, 1400])]
    pub lengths: Vec<usize>,
    /// Dimensions, as a list (`1,2,5`) or a range (`1-50`).
    #[arg(long, default_value = "1")]
    pub dims: String,
    /// Null panels per length and dimension.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Candidate constants as `start:stop:step`.
    #[arg(long, default_value = "0.05:3.00:0.01")]
    pub grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = mid_core::DEFAULT_LAMBDA)]
    pub lambda: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
