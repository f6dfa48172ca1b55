#![allow(dead_code)]

pub mod mfcc_ref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qad_core::oracle::center;
use qad_core::rng::{self, SimRng};
use qad_core::{DensityMatrix, FeatureVector, TrainingSet};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gauss(r: &mut SimRng) -> f64 {
    r.sample(StandardNormal)
}

pub fn seeded(seed: u64) -> SimRng {
    rng::rng(seed)
}

pub fn random_vector(r: &mut SimRng, d: usize) -> FeatureVector {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gauss(r)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            return FeatureVector::new(v).unwrap();
        }
    }
}

pub fn random_centered_set(r: &mut SimRng, m: usize, d: usize) -> TrainingSet {
    let vectors = (0..m).map(|_| random_vector(r, d)).collect();
    center(vectors).unwrap()
}

/// `A A† / tr(A A†)` for a complex Gaussian `A`.
pub fn random_density(r: &mut SimRng, num_qubits: usize) -> DensityMatrix {
    let dim = 1 << num_qubits;
    let a = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(gauss(r), gauss(r)));
    let rho = &a * a.adjoint();
    let tr = rho.trace().re;
    let rho = rho / Complex64::new(tr, 0.0);
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(rho).unwrap()
}

pub const SLOPE_SHOTS: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];

/// Root-mean-square error of the unclamped `P₀` estimate at each shot count
/// in [`SLOPE_SHOTS`], over `trials` noise seeds.
pub fn readout_rmse(rho: &DensityMatrix, trials: u64, base_seed: u64) -> Vec<f64> {
    use qad_core::readout::{
        extract_p0, simulate_counts, Calibration, LuminescenceConfig, ReadoutNoise,
    };
    use qad_core::{Measurable, QubitIndex};

    let base = LuminescenceConfig::default();
    let cal = Calibration::from_config(&base).unwrap();
    let truth = rho.measure_population(QubitIndex(0), false).unwrap();
    SLOPE_SHOTS
        .iter()
        .map(|&shots| {
            let mse = (0..trials)
                .map(|t| {
                    let cfg = base
                        .clone()
                        .with_shots(shots)
                        .with_noise(ReadoutNoise::Poisson {
                            seed: rng::item_seed(rng::sub_seed(base_seed, &shots.to_string()), t),
                        });
                    let p = extract_p0(&simulate_counts(rho, &cfg).unwrap(), &cal).unwrap();
                    (p.raw - truth).powi(2)
                })
                .sum::<f64>()
                / trials as f64;
            mse.sqrt()
        })
        .collect()
}

/// Least-squares slope of `log10 rmse` against `log10 shots`.
pub fn log_log_slope(rmse: &[f64]) -> f64 {
    let xs: Vec<f64> = SLOPE_SHOTS.iter().map(|s| (*s as f64).log10()).collect();
    let ys: Vec<f64> = rmse.iter().map(|e| e.log10()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Leading eigenvector of a symmetric matrix by power iteration.
pub fn leading_eigenvector(a: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    let mut v = nalgebra::DVector::from_element(a.nrows(), 1.0).normalize();
    for _ in 0..10_000 {
        let next = (a * &v).normalize();
        if (&next - &v).norm() < 1e-15 {
            return next;
        }
        v = next;
    }
    v
}

/// Angle between two lines through the origin.
pub fn line_angle(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
    (a.dot(b).abs() / (a.norm() * b.norm())).min(1.0).acos()
}
