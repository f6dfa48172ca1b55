//! Evaluation: scoring, threshold sweeps, heatmaps and report files.

pub mod bench;
pub mod heatmap;
pub mod report;
pub mod score;
pub mod sweep;

pub use bench::{
    run_benchmark, synthetic_benchmark, BenchmarkConfig, Evaluation, SyntheticBenchmark,
};
pub use heatmap::{heatmap, Bounds, HeatmapGrid, HeatmapSource};
pub use report::{export_report, read_summary, write_scores, Report};
pub use score::{score_testset, LabeledPoint, ScoreMethod, ScoredSample};
pub use sweep::{normalize_and_sweep, ErrorCurve, DEFAULT_THRESHOLDS};
