use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emcomm_core::model::game::GameKind;

#[derive(Parser, Debug)]
#[command(name = "emcomm", version, about = "Analyze emergent-communication protocols on finite input spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Monte-Carlo budget when exact evaluation is too large.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub samples: u64,

    /// Directory for report files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Format printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true, value_enum, default_value_t = LogBase::Nats)]
    pub log_base: LogBase,

    /// Log filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Nats,
    Bits,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Game {
    Reconstruction,
    Discrimination,
    Global,
    Supervised,
    Classification,
}

impl From<Game> for GameKind {
    fn from(g: Game) -> Self {
        match g {
            Game::Reconstruction => GameKind::Reconstruction,
            Game::Discrimination => GameKind::Discrimination,
            Game::Global => GameKind::Global,
            Game::Supervised => GameKind::Supervised,
            Game::Classification => GameKind::Classification,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Input space: CSV `id,x0,..,weight[,label]` or its JSON mirror.
    #[arg(long)]
    pub input: PathBuf,

    /// Protocol: CSV `id,message` or its JSON mirror.
    #[arg(long)]
    pub protocol: PathBuf,

    /// Attribute table: CSV `id,attr1,attr2,...`.
    #[arg(long)]
    pub labels: Option<PathBuf>,

    /// Vocabulary size (defaults to the largest symbol used plus one).
    #[arg(long)]
    pub vocab: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    #[arg(long, value_enum, default_value_t = Game::Reconstruction)]
    pub game: Game,

    /// Candidates per episode [default: 2].
    #[arg(long)]
    pub d: Option<usize>,

    /// Attribute used as the label for supervised and classification games.
    #[arg(long)]
    pub label_attr: Option<String>,
}

impl GameArgs {
    pub fn candidates(&self) -> usize {
        self.d.unwrap_or(2)
    }
}

#[derive(Args, Debug, Clone)]
pub struct MetricArgs {
    /// Shuffles for the random baseline.
    #[arg(long, default_value_t = 100)]
    pub repeats: u64,

    /// Candidates for discrimination accuracy (one target plus distractors).
    #[arg(long, default_value_t = 41)]
    pub accuracy_d: usize,

    /// Accuracy episodes per input.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,

    /// Symbol groups for cluster variance, e.g. `01,23,45`.
    #[arg(long, value_delimiter = ',')]
    pub groups: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Game loss, objectives, consistency checks and metrics for one protocol.
    Analyze {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        /// Proximity threshold for spatial meaningfulness (defaults to ε_M).
        #[arg(long)]
        epsilon0: Option<f64>,
    },
    /// Flat metric report for one protocol.
    Metrics {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        metrics: MetricArgs,
    },
    /// Check closed forms, definitions or corollaries and emit verdicts.
    Verify(VerifyArgs),
    /// Search for a good protocol and write it with its objective trace.
    Optimize(OptimizeArgs),
    /// Build and verify one of the explicit counterexample instances.
    Counterexample {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        expect: Option<bool>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Thm5,
    Thm2,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Closed-form check: 1 (reconstruction), 2 (discrimination),
    /// a1 (global), a2 (supervised), a3 (classification).
    #[arg(long)]
    pub lemma: Vec<String>,

    /// Definition check on the given files: 3, 4, 5 or 6.
    #[arg(long)]
    pub def: Vec<String>,

    /// Equal-mass optimality check: 1.
    #[arg(long)]
    pub corollary: Vec<String>,

    /// Exit with status 1 unless every verdict equals this.
    #[arg(long)]
    pub expect: Option<bool>,

    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,

    #[command(flatten)]
    pub game: GameArgs,

    /// Messages for the corollary check.
    #[arg(long, default_value_t = 3)]
    pub k: usize,

    #[arg(long)]
    pub epsilon0: Option<f64>,

    /// Random protocols in a closed-form population.
    #[arg(long, default_value_t = 200)]
    pub protocols: usize,

    #[arg(long, default_value_t = 8)]
    pub max_n: usize,

    #[arg(long, default_value_t = 4)]
    pub max_k: usize,

    #[arg(long, default_value_t = 3)]
    pub max_dim: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Kmeans,
    Exhaustive,
    Balanced,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Greedy,
    Adversarial,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub labels: Option<PathBuf>,

    #[command(flatten)]
    pub game: GameArgs,

    #[arg(long, value_enum, default_value_t = Method::Kmeans)]
    pub method: Method,

    /// Number of messages.
    #[arg(long)]
    pub k: usize,

    #[arg(long, value_enum, default_value_t = Flavor::Greedy)]
    pub flavor: Flavor,

    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,

    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,

    /// Initial centroids, `;`-separated points of `,`-separated coordinates.
    #[arg(long)]
    pub centroids: Option<String>,
}
