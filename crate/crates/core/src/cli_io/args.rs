use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "areaflow", version, about = "Area-preserving inverse-curvature flow of convex plane curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single simulation.
    Run(RunArgs),
    /// Run the cartesian product of exponents and perturbation amplitudes.
    Sweep(SweepArgs),
    /// Re-check the claims on an existing diagnostics.csv.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rk4,
    SemiImplicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DerivArg {
    Spectral,
    Fd2,
}

#[derive(Clone, Debug, Default, Args)]
pub struct FlowArgs {
    /// Exponent of the inverse curvature speed.
    #[arg(long)]
    pub n: Option<f64>,
    /// Number of tangent-angle samples (even, >= 16).
    #[arg(long = "grid-size", short = 'M')]
    pub grid_size: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long = "snapshot-interval")]
    pub snapshot_interval: Option<f64>,
    #[arg(long = "closure-tol")]
    pub closure_tol: Option<f64>,
    #[arg(long = "positivity-floor")]
    pub positivity_floor: Option<f64>,
    #[arg(long = "project-closure")]
    pub project_closure: bool,
    #[arg(long = "renormalize-area")]
    pub renormalize_area: bool,
    #[arg(long, value_enum)]
    pub deriv: Option<DerivArg>,
    /// Fixed time step instead of the CFL estimate.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// circle:R | ellipse:A:B | fourier:A0[:a@k | :a,b@k ...] | import:PATH
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long = "target-area")]
    pub target_area: Option<f64>,
    #[arg(long = "output-dir", short = 'o')]
    pub output_dir: Option<PathBuf>,
    #[arg(long = "no-snapshots")]
    pub no_snapshots: bool,
    #[command(flatten)]
    pub flow: FlowArgs,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "n-values", value_delimiter = ',', required = true)]
    pub n_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub amplitudes: Vec<f64>,
    /// Perturbed mode `k` in `a0 + amplitude cos(k theta)`.
    #[arg(long, default_value_t = 2)]
    pub mode: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    #[arg(long = "target-area")]
    pub target_area: Option<f64>,
    #[arg(long = "output-dir", short = 'o')]
    pub output_dir: Option<PathBuf>,
    #[arg(long = "no-snapshots")]
    pub no_snapshots: bool,
    #[command(flatten)]
    pub flow: FlowArgs,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Directory holding diagnostics.csv (and config.json unless --n is given).
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub n: Option<f64>,
    /// Also overwrite verdict.json in the directory.
    #[arg(long)]
    pub write: bool,
}
