//! Simulation and evaluation of PCA-based quantum anomaly detection.
//!
//! The crate covers the full path from audio to anomaly scores:
//!
//! - [`audio`]: WAV loading, segmentation, MFCC extraction and PCA.
//! - [`oracle`]: classical centering, covariance and proximity scores.
//! - [`quantum`]: a small dense state-vector and density-matrix simulator.
//! - [`circuit`]: the training-state preparation and the quantum proximity
//!   estimators built on it.
//! - [`readout`]: the photon-count model of the electron readout.
//! - [`eval`]: scoring, threshold sweeps, heatmaps and report export.
//! - [`model`]: the fitted detector and its file format.

pub mod audio;
pub mod circuit;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod oracle;
pub mod quantum;
pub mod readout;
pub mod rng;

pub use error::{Error, ErrorKind, Result};
pub use oracle::{FeatureVector, TrainingSet};
pub use quantum::{DensityMatrix, Measurable, QubitIndex, StateVector};
