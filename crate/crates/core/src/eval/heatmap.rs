//! Scores rasterized over the 2-D feature plane.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oracle::{CovarianceMatrix, TrainingSet};
use crate::quantum::{DensityMatrix, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidInput(format!(
                "degenerate heatmap bounds {self:?}"
            )));
        }
        Ok(())
    }

    /// Bounding box of the (centered) training vectors with each half-width
    /// enlarged by 50%. A flat axis borrows the other axis' extent.
    pub fn around_training(ts: &TrainingSet) -> Result<Self> {
        if ts.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: ts.dim(),
            });
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in ts.vectors() {
            for k in 0..2 {
                lo[k] = lo[k].min(v.components()[k]);
                hi[k] = hi[k].max(v.components()[k]);
            }
        }
        let mut half = [0.0; 2];
        for k in 0..2 {
            half[k] = (hi[k] - lo[k]) / 2.0 * 1.5;
        }
        let fallback = half[0].max(half[1]);
        if !(fallback > 0.0) {
            return Err(Error::Degenerate("training vectors coincide".into()));
        }
        let half = half.map(|h| if h > 0.0 { h } else { fallback });
        let mid = [(hi[0] + lo[0]) / 2.0, (hi[1] + lo[1]) / 2.0];
        Ok(Self {
            x_min: mid[0] - half[0],
            x_max: mid[0] + half[0],
            y_min: mid[1] - half[1],
            y_max: mid[1] + half[1],
        })
    }
}

/// What the proximity measure is evaluated from.
#[derive(Debug, Clone, Copy)]
pub enum HeatmapSource<'a> {
    Covariance(&'a CovarianceMatrix),
    /// A data-qubit density matrix (for example from tomography) together
    /// with `tr C`.
    Density {
        rho: &'a DensityMatrix,
        trace_factor: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub bounds: Bounds,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `nx × ny`; NaN at the exact origin, where `f` is undefined.
    pub values_f: DMatrix<f64>,
    pub values_g: DMatrix<f64>,
}

impl HeatmapGrid {
    pub fn resolution(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Evaluates `g = |v|²` and `f = |v|² − tr C · ⟨ψ_v|ρ|ψ_v⟩` on a grid in the
/// training frame.
pub fn heatmap(
    source: HeatmapSource<'_>,
    bounds: Bounds,
    nx: usize,
    ny: usize,
) -> Result<HeatmapGrid> {
    bounds.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput(format!(
            "heatmap resolution {nx}×{ny} is below 2×2"
        )));
    }
    let overlap: Box<dyn Fn(f64, f64) -> Result<f64>> = match source {
        HeatmapSource::Covariance(cov) => {
            if cov.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: cov.dim(),
                });
            }
            Box::new(move |x, y| {
                let r = x.hypot(y);
                Ok(cov.quadratic_form(&[x / r, y / r]))
            })
        }
        HeatmapSource::Density { rho, trace_factor } => {
            if rho.num_qubits() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: rho.num_qubits(),
                });
            }
            if !(trace_factor.is_finite() && trace_factor >= 0.0) {
                return Err(Error::InvalidInput(format!("trace factor {trace_factor}")));
            }
            Box::new(move |x, y| {
                let psi = StateVector::from_real_unnormalized(&[x, y])?;
                Ok(trace_factor * rho.expectation(&psi)?)
            })
        }
    };
    let xs = axis(bounds.x_min, bounds.x_max, nx);
    let ys = axis(bounds.y_min, bounds.y_max, ny);
    let mut values_f = DMatrix::zeros(nx, ny);
    let mut values_g = DMatrix::zeros(nx, ny);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let g = x * x + y * y;
            values_g[(i, j)] = g;
            values_f[(i, j)] = if g == 0.0 {
                f64::NAN
            } else {
                g - overlap(x, y)?
            };
        }
    }
    Ok(HeatmapGrid {
        bounds,
        xs,
        ys,
        values_f,
        values_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{covariance_density, TrainingModel};
    use crate::fixtures::violin_training_set;
    use crate::oracle::covariance_matrix;

    fn square(r: f64) -> Bounds {
        Bounds {
            x_min: -r,
            x_max: r,
            y_min: -r,
            y_max: r,
        }
    }

    #[test]
    fn density_and_covariance_grids_agree() {
        let ts = violin_training_set();
        let cov = covariance_matrix(&ts).unwrap();
        let rho = covariance_density(&TrainingModel::new(&ts).unwrap()).unwrap();
        let a = heatmap(HeatmapSource::Covariance(&cov), square(1.5), 41, 41).unwrap();
        let b = heatmap(
            HeatmapSource::Density {
                rho: &rho,
                trace_factor: cov.trace_factor(),
            },
            square(1.5),
            41,
            41,
        )
        .unwrap();
        assert_eq!(a.values_g, b.values_g);
        assert!(a.values_f[(20, 20)].is_nan() && b.values_f[(20, 20)].is_nan());
        assert_eq!(a.values_g[(20, 20)], 0.0);
        for (x, y) in a.values_f.iter().zip(b.values_f.iter()) {
            assert!(x.is_nan() && y.is_nan() || (x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn f_grows_slowest_along_top_eigenvector() {
        let cov = covariance_matrix(&violin_training_set()).unwrap();
        let eig = nalgebra::SymmetricEigen::new(cov.entries().clone());
        let (top, bottom) = if eig.eigenvalues[0] > eig.eigenvalues[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        let f_at = |k: usize, r: f64| {
            let u = eig.eigenvectors.column(k);
            r * r - cov.quadratic_form(&[u[0], u[1]])
        };
        for r in [0.5, 1.0, 2.0] {
            assert!(f_at(top, r) < f_at(bottom, r));
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let cov = covariance_matrix(&violin_training_set()).unwrap();
        let src = HeatmapSource::Covariance(&cov);
        assert!(heatmap(src, square(1.0), 1, 5).is_err());
        let flat = Bounds {
            x_min: 1.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        };
        assert!(heatmap(src, flat, 5, 5).is_err());
    }

    #[test]
    fn default_bounds_inflate_bounding_box() {
        let b = Bounds::around_training(&violin_training_set()).unwrap();
        // x spans [-0.789, 0.751], y spans [-0.639, 0.531]
        assert!((b.x_max - b.x_min - 1.5 * 1.54).abs() < 1e-12);
        assert!((b.y_max - b.y_min - 1.5 * 1.17).abs() < 1e-12);
    }
}
