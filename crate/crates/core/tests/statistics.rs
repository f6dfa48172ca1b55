mod common;

use common::{
    gauss, leading_eigenvector, line_angle, log_log_slope, random_density, readout_rmse, seeded,
};
use nalgebra::{DMatrix, DVector};
use qad_core::audio::pca_fit;
use qad_core::rng;

fn rotation4(theta: f64, phi: f64) -> DMatrix<f64> {
    let g1 = DMatrix::from_row_slice(
        4,
        4,
        &[
            theta.cos(),
            -theta.sin(),
            0.0,
            0.0,
            theta.sin(),
            theta.cos(),
            0.0,
            0.0,
            0.0,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            0.0,
            1.0,
        ],
    );
    let g2 = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0,
            0.0,
            0.0,
            0.0,
            0.0,
            phi.cos(),
            0.0,
            -phi.sin(),
            0.0,
            0.0,
            1.0,
            0.0,
            0.0,
            phi.sin(),
            0.0,
            phi.cos(),
        ],
    );
    g2 * g1
}

#[test]
fn pca_recovers_gaussian_axes() {
    let n = 100_000;
    let sd = [3.0, 2.0, 1.0, 0.5];
    let rot = rotation4(0.7, -0.4);
    let mut r = seeded(11);
    let data: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw = DVector::from_iterator(4, sd.iter().map(|s| s * gauss(&mut r)));
            (&rot * raw).iter().copied().collect()
        })
        .collect();
    let model = pca_fit(&data, 2).unwrap();
    let first = model.components().column(0).into_owned();

    let mean = data.iter().fold(DVector::zeros(4), |acc, v| {
        acc + DVector::from_column_slice(v)
    }) / n as f64;
    let mut cov = DMatrix::zeros(4, 4);
    for v in &data {
        let c = DVector::from_column_slice(v) - &mean;
        cov += &c * c.transpose();
    }
    cov /= (n - 1) as f64;
    assert!(line_angle(&first, &leading_eigenvector(&cov)) < 1e-6);

    // angular standard error ≈ sqrt(λ1 λ2 / ((λ1 − λ2)² n)) ≈ 0.004 rad
    let truth = rot.column(0).into_owned();
    assert!(line_angle(&first, &truth) < 0.02);

    let ratio = model.explained_variance_ratio();
    let total: f64 = sd.iter().map(|s| s * s).sum();
    assert!((ratio[0] - 9.0 / total).abs() < 0.01);
}

#[test]
fn readout_error_shrinks_as_inverse_sqrt_shots() {
    let rho = random_density(&mut seeded(5), 3);
    let rmse = readout_rmse(&rho, 60, rng::sub_seed(3, "slope"));
    assert!(rmse.windows(2).all(|w| w[1] < w[0]), "{rmse:?}");
    let slope = log_log_slope(&rmse);
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}
