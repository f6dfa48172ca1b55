//! Audio front end: WAV input, segmentation, MFCC and PCA features.

pub mod dataset;
pub mod mfcc;
pub mod pca;
pub mod segment;
pub mod synth;
pub mod wav;

pub use dataset::{
    extract_features, read_features, read_manifest, write_features, FeatureRow, Label,
    ManifestEntry, PcaRows, PipelineConfig, Split,
};
pub use mfcc::{mfcc, MfccArray, MfccConfig, MfccExtractor};
pub use pca::{pca_fit, PcaModel, FEATURE_SCALE};
pub use segment::{extract_segment, AudioSegment, SegmentConfig, PIPELINE_RATE};
pub use wav::{load_wav, write_wav, Recording};
