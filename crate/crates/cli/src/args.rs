use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jupylabel::{AnnotationMode, Routing};

#[derive(Debug, Parser)]
#[command(
    name = "jupylabel",
    version,
    about = "Label the activities of Jupyter notebook code cells"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate notebooks with activity labels.
    Label(LabelArgs),
    /// Train the eight activity models from a labeled-cell dataset.
    Train(TrainArgs),
    /// Score a model artifact against a labeled-cell dataset.
    Eval(EvalArgs),
    /// Time the labeling of a notebook corpus.
    Bench(BenchArgs),
    /// Remove annotations written by `label`.
    Strip(StripArgs),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Model artifact.
    #[arg(long, env = "JUPYLABEL_MODEL")]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write results under this directory instead of next to the inputs.
    #[arg(long, conflicts_with = "in_place")]
    pub output_dir: Option<PathBuf>,
    /// Overwrite the input notebooks.
    #[arg(long)]
    pub in_place: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Headers,
    Tags,
}

impl From<ModeArg> for AnnotationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Headers => AnnotationMode::Headers,
            ModeArg::Tags => AnnotationMode::Tags,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoutingArg {
    #[value(name = "per_activity", alias = "per-activity")]
    PerActivity,
    #[value(name = "cell_level", alias = "cell-level")]
    CellLevel,
}

impl From<RoutingArg> for Routing {
    fn from(r: RoutingArg) -> Self {
        match r {
            RoutingArg::PerActivity => Routing::PerActivity,
            RoutingArg::CellLevel => Routing::CellLevel,
        }
    }
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Notebook files or directories (searched recursively for .ipynb).
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub model: ModelArg,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "headers")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "per_activity")]
    pub routing: RoutingArg,
    /// Print rule hits and model probabilities for every cell to stderr.
    #[arg(long)]
    pub debug: bool,
    /// Also write each notebook's classification table as JSON.
    #[arg(long)]
    pub export_table: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled-cell dataset (JSON), or notebooks tagged with `jupylabel:` labels.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the artifact (default: <output-dir>/model.json).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Directory for the artifact and training_report.json.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Training configuration (JSON); missing fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Labeled-cell dataset (JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArg,
    /// Drop matching cells before scoring: a file of regexes, one per line,
    /// or `default` for the built-in list.
    #[arg(long)]
    pub blocklist: Option<String>,
    #[arg(long, value_enum, default_value = "per_activity")]
    pub routing: RoutingArg,
    /// Write metrics.json here.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also write per-cell predictions to the output directory.
    #[arg(long, requires = "output_dir")]
    pub export_table: bool,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    #[arg(long, value_enum, default_value = "headers")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "per_activity")]
    pub routing: RoutingArg,
    #[arg(long)]
    pub jobs: Option<usize>,
}
