//! File-driven front end for the spectral-topics pipeline.
//!
//! Subcommands: `prepare` (cubes to corpus + co-occurrences), `build-c`
//! (co-occurrences to dependency matrix), `train`, `eval`, `export-topics`.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "spectral-topics",
    about = "Topic models for hyperspectral signatures: regularized and standard variational Bayes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn reflectance cubes into a spectral-word corpus plus
    /// co-occurrence counts from block-aggregated signatures.
    Prepare(PrepareArgs),
    /// Build the row-stochastic word-pair dependency matrix C from
    /// co-occurrence counts via positive PMI.
    #[command(name = "build-c")]
    BuildC(BuildCArgs),
    /// Fit a topic model (standard or regularized, batch or online).
    Train(TrainArgs),
    /// Evaluate a fitted model: background-topic distance, per-group
    /// Dirichlet expectations, paired ratio test.
    Eval(EvalArgs),
    /// Print the highest-probability words of each topic.
    #[command(name = "export-topics")]
    ExportTopics(ExportArgs),
}

#[derive(Args)]
struct PrepareArgs {
    /// Cube file(s) in the binary HSC1 format; documents are appended in
    /// cube order.
    #[arg(long = "cube", required = true)]
    cubes: Vec<PathBuf>,
    /// White-reference spectrum (one value per band); divides every pixel.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Pixel keep/drop mask(s): none, one shared, or one per cube.
    #[arg(long = "mask")]
    masks: Vec<PathBuf>,
    #[arg(long, default_value_t = 470.0)]
    band_lo: f64,
    #[arg(long, default_value_t = 750.0)]
    band_hi: f64,
    /// Reflectance bins per band (R).
    #[arg(long, default_value_t = 50)]
    r_bins: usize,
    #[arg(long, default_value_t = 0.0)]
    refl_lo: f64,
    #[arg(long, default_value_t = 1.2)]
    refl_hi: f64,
    /// Reflectance binning scheme.
    #[arg(long, value_enum, default_value_t = BinningArg::EqualWidth)]
    binning: BinningArg,
    /// Side of the non-overlapping aggregation tiles feeding the
    /// co-occurrence counts.
    #[arg(long, default_value_t = 5)]
    block: usize,
    /// Pair adjacent bands regardless of reflectance-bin distance.
    #[arg(long)]
    unconstrained_pairs: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BinningArg {
    /// Equal-width bins over one global reflectance range.
    EqualWidth,
    /// Equal-width bins over each band's observed range (first cube).
    PerBand,
    /// Global quantile bins over observed reflectances (first cube).
    Quantile,
}

#[derive(Args)]
struct BuildCArgs {
    /// Co-occurrence counts file written by `prepare`.
    #[arg(long)]
    cooc: PathBuf,
    /// Keep off-diagonal PMI only between this many most frequent words.
    #[arg(long, default_value_t = 1000)]
    top_n: usize,
    /// Skip row normalization (ablation).
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainMode {
    StandardBatch,
    StandardOnline,
    RegBatch,
    RegOnline,
}

#[derive(Args)]
struct TrainArgs {
    /// Optional key=value file; command-line flags win over file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Dependency-matrix file (required for the regularized modes).
    #[arg(long)]
    c: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<TrainMode>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Mini-batch size S for the online modes.
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    tau0: Option<f64>,
    /// Fixed-point sweeps per regularized M step.
    #[arg(long)]
    reg_iter: Option<usize>,
    /// Online stop budget in passes over the corpus (ceil(D/S) updates
    /// each).
    #[arg(long)]
    passes: Option<usize>,
    /// Batch epoch cap.
    #[arg(long)]
    epochs: Option<usize>,
    /// Relative objective change that ends a batch run early (0 disables).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// E-step worker threads; 1 is the bit-reproducibility reference (the
    /// fixed-order merge makes other counts match it anyway).
    #[arg(long)]
    threads: Option<usize>,
    /// Shuffle-and-chunk batches instead of independent draws.
    #[arg(long)]
    epoch_sampling: bool,
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// CSV of per-epoch objective (batch) or per-update rho and GRT
    /// (online).
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Grouping manifest: one `name class start end` line per image, class
    /// `a` or `b`, documents [start, end).
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Numerator topic of the per-image ratio.
    #[arg(long, default_value_t = 0)]
    topic_num: usize,
    /// Denominator topic of the per-image ratio.
    #[arg(long, default_value_t = 1)]
    topic_den: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    /// Vocabulary file mapping word ids to terms; ids are printed without
    /// it.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Words per topic.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Prepare(args) => commands::prepare(args),
        Command::BuildC(args) => commands::build_c(args),
        Command::Train(args) => commands::train(args),
        Command::Eval(args) => commands::eval(args),
        Command::ExportTopics(args) => commands::export_topics(args),
    }
}
