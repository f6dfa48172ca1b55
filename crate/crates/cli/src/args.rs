use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qad_core::rng::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "qad",
    version,
    about = "PCA-based quantum anomaly detection toolkit"
)]
pub struct Cli {
    /// Top-level seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract 2-D features from the audio listed in a manifest.
    Features(FeaturesArgs),
    /// Build a detector model from training vectors.
    Train(TrainArgs),
    /// Score the test split of a feature table.
    Score(ScoreArgs),
    /// Score, sweep thresholds and write the full report.
    Eval(ScoreArgs),
    /// Rasterize both scores over the feature plane.
    Heatmap(HeatmapArgs),
    /// Reconstruct the data-qubit state and compare it to a reference.
    Tomography(TomographyArgs),
    /// Run the synthetic anisotropic benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// CSV with header `path,label,split`.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory for features.csv, pca_model.txt and diagnostics.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Rows the PCA is fitted on.
    #[arg(long, value_enum, default_value_t = PcaFit::Train)]
    pub pca_fit: PcaFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PcaFit {
    Train,
    All,
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// Model file written by `qad train`.
    #[arg(long, conflicts_with = "vectors")]
    pub model: Option<PathBuf>,
    /// Training vectors given inline as "x1,y1;x2,y2;...".
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: Option<String>,
    /// Treat --vectors as already centered.
    #[arg(long, requires = "vectors")]
    pub pre_centered: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature table to pick training rows from.
    #[arg(long, conflicts_with = "vectors")]
    pub features: Option<PathBuf>,
    /// Comma-separated source ids; defaults to the table's train split.
    #[arg(long, requires = "features")]
    pub train_ids: Option<String>,
    /// Training vectors given inline as "x1,y1;x2,y2;...".
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: Option<String>,
    /// Skip centering (the vectors are already in the training frame).
    #[arg(long)]
    pub pre_centered: bool,
    /// Number of training slots the circuit is laid out for.
    #[arg(long, default_value_t = 4)]
    pub slots: usize,
    /// Where to write the model file.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Classical,
    QuantumExact,
    QuantumPhoton,
}

#[derive(Debug, Args)]
pub struct ReadoutArgs {
    /// Proximity evaluation route.
    #[arg(long, value_enum, default_value_t = Method::Classical)]
    pub method: Method,
    /// Shots per pulse sequence; enables Poisson noise for quantum-photon.
    #[arg(long)]
    pub shots: Option<u64>,
    /// TOML readout configuration (rates, shots, noise, seed).
    #[arg(long)]
    pub readout_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature table; its test split is scored.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub readout: ReadoutArgs,
    /// Heatmap points per axis (eval only).
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Evaluate f through this data-qubit density matrix, "a,b;c,d".
    #[arg(long, allow_hyphen_values = true)]
    pub reference_dm: Option<String>,
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TomographyArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Reference density matrix "a,b;c,d"; defaults to the ideal state.
    #[arg(long, allow_hyphen_values = true)]
    pub reference_dm: Option<String>,
    /// Shots per measurement basis; exact expectation values when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Ratio of the normals' standard deviations along x and y.
    #[arg(long, default_value_t = 5.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 4)]
    pub n_train: usize,
    #[arg(long, default_value_t = 100)]
    pub n_test: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub readout: ReadoutArgs,
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
}
