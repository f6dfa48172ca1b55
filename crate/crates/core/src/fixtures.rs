//! Reference data of the four-sample violin demonstration.

use crate::error::Result;
use crate::oracle::{FeatureVector, TrainingSet};
use crate::quantum::DensityMatrix;

/// Four violin feature vectors used as the training set, rounded to three
/// decimals (they sum to `(0, -0.001)` rather than exactly zero).
pub const VIOLIN_TRAINING_VECTORS: [[f64; 2]; 4] = [
    [-0.789, 0.130],
    [0.751, -0.023],
    [0.617, 0.531],
    [-0.579, -0.639],
];

/// Data-qubit density matrix reconstructed by tomography on hardware.
pub const TOMOGRAPHY_REFERENCE: [[f64; 2]; 2] = [[0.6996, 0.2151], [0.2151, 0.3004]];

/// Reported fidelity between [`TOMOGRAPHY_REFERENCE`] and the ideal state.
pub const REPORTED_FIDELITY: f64 = 0.99;

/// The violin vectors taken as already centered.
pub fn violin_training_set() -> TrainingSet {
    TrainingSet::assume_centered(
        VIOLIN_TRAINING_VECTORS
            .iter()
            .map(|v| FeatureVector::from(*v))
            .collect(),
    )
    .expect("four 2-D vectors")
}

pub fn tomography_reference() -> Result<DensityMatrix> {
    DensityMatrix::from_real(&[&TOMOGRAPHY_REFERENCE[0], &TOMOGRAPHY_REFERENCE[1]])
}
