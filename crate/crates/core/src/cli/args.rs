use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Spectral solver and estimate probes for long-wave models of large-amplitude surface waves.
#[derive(Debug, Parser)]
#[command(name = "lasw", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one initial-value problem.
    Run(CommonArgs),
    /// Run a numerical estimate probe.
    Probe(CommonArgs),
    /// Self-convergence study in space and time.
    Converge(CommonArgs),
    /// A family of runs varying one configuration parameter.
    Sweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured grid size where the command has a single grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Only report errors.
    #[arg(long)]
    pub quiet: bool,
    /// Root for default output directories.
    #[arg(long, env = "LASW_OUTPUT_ROOT", hide = true)]
    pub output_root: Option<PathBuf>,
}

impl Cli {
    pub fn common(&self) -> &CommonArgs {
        match &self.command {
            Command::Run(a) | Command::Probe(a) | Command::Converge(a) | Command::Sweep(a) => a,
        }
    }
}
