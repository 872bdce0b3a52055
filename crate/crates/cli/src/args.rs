use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "multirail",
    version,
    about = "Multi-rail photonic state generation and GME verification"
)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file of default flag values (keys are flag names); explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Regenerate the data of a published figure with built-in parameters.
    #[arg(long, value_parser = ["fig2a", "fig2b", "fig4", "fig5"])]
    pub reproduce: Option<String>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a postselected state and write it as JSON.
    Gen(GenArgs),
    /// Evaluate a verifier and its biproducible bound on a state file.
    Verify(VerifyArgs),
    /// Sweep the displacement of a squeezed source and tabulate verifier values.
    Sweep(SweepArgs),
    /// Measurement statistics of a state file.
    Stats(StatsArgs),
    /// List the shift classes of a system.
    Classes(ClassesArgs),
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Number of parties.
    #[arg(long)]
    pub parties: usize,
    /// Modes per party (M).
    #[arg(long)]
    pub modes: usize,
    /// Local photon numbers, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub photons: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct SqueezingArgs {
    /// Squeezing factor.
    #[arg(long, conflicts_with = "r_db")]
    pub r: Option<f64>,
    /// Squeezing in dB, converted with r = dB ln(10) / 20.
    #[arg(long = "r-db")]
    pub r_db: Option<f64>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GenArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// single-photon | fock:NU | coherent:RE[,IM] | squeezed
    #[arg(long)]
    pub source: String,
    #[command(flatten)]
    pub squeezing: SqueezingArgs,
    /// Displacement of a squeezed source.
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifierArgs {
    /// HW indices, one per party.
    #[arg(long, value_delimiter = ',', required = true)]
    pub j: Vec<usize>,
    /// Measurement labels (default: all).
    #[arg(long = "L", value_delimiter = ',')]
    pub labels: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[command(flatten)]
    pub verifier: VerifierArgs,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub kappa: usize,
    /// Report every kappa (the per-kappa table is always included; this makes
    /// the verdict "detected" if any kappa is detected).
    #[arg(long)]
    pub all_kappa: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub squeezing: SqueezingArgs,
    #[command(flatten)]
    pub verifier: VerifierArgs,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long = "x-from", default_value_t = 0.0)]
    pub x_from: f64,
    #[arg(long = "x-to")]
    pub x_to: f64,
    #[arg(long = "x-step")]
    pub x_step: f64,
    /// Uniform per-mode loss rate; adds loss columns.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Largest total number of lost photons kept in the mixture.
    #[arg(long)]
    pub cutoff: Option<u32>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct StatsArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// computational | l=<int>
    #[arg(long, default_value = "computational")]
    pub setting: String,
    /// HW indices for l=<int> settings.
    #[arg(long, value_delimiter = ',')]
    pub j: Option<Vec<usize>>,
    /// Draw this many samples and append their counts.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Adds the j-weighted clock label of each class and the label validity matrix.
    #[arg(long, value_delimiter = ',')]
    pub j: Option<Vec<usize>>,
}
