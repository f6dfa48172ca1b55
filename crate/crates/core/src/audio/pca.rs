//! Principal component analysis of flattened MFCC arrays.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Principal-component coordinates are divided by this before use as
/// detector features.
pub const FEATURE_SCALE: f64 = 100.0;

const FORMAT_HEADER: &str = "qad-pca";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: DVector<f64>,
    /// `dim × k`, columns orthonormal.
    components: DMatrix<f64>,
    /// All `dim` eigenvalues of the sample covariance, non-increasing.
    eigenvalues: DVector<f64>,
    num_samples: usize,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn total_variance(&self) -> f64 {
        self.eigenvalues.sum()
    }

    /// True when the samples have no spread at all.
    pub fn is_degenerate(&self) -> bool {
        !(self.total_variance() > 0.0)
    }

    /// Fraction of variance carried by each kept component; zeros when the
    /// fit is degenerate.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        let total = self.total_variance();
        (0..self.num_components())
            .map(|k| {
                if total > 0.0 {
                    self.eigenvalues[k] / total
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Unscaled coordinates along every kept component.
    pub fn transform(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v)?;
        let centered = DVector::from_column_slice(v) - &self.mean;
        Ok((self.components.transpose() * centered)
            .iter()
            .copied()
            .collect())
    }

    pub fn inverse_transform(&self, coords: &[f64]) -> Result<Vec<f64>> {
        if coords.len() != self.num_components() {
            return Err(Error::DimensionMismatch {
                expected: self.num_components(),
                found: coords.len(),
            });
        }
        let v = &self.mean + &self.components * DVector::from_column_slice(coords);
        Ok(v.iter().copied().collect())
    }

    /// The two detector features: the first two coordinates over
    /// [`FEATURE_SCALE`].
    pub fn project(&self, v: &[f64]) -> Result<[f64; 2]> {
        if self.num_components() < 2 {
            return Err(Error::InvalidInput(
                "projection needs a model with at least two components".into(),
            ));
        }
        let c = self.transform(v)?;
        Ok([c[0] / FEATURE_SCALE, c[1] / FEATURE_SCALE])
    }

    /// Inverse of [`PcaModel::project`] within the span of the first two
    /// components.
    pub fn unproject(&self, feature: [f64; 2]) -> Result<Vec<f64>> {
        if self.num_components() < 2 {
            return Err(Error::InvalidInput(
                "projection needs a model with at least two components".into(),
            ));
        }
        let mut coords = vec![0.0; self.num_components()];
        coords[0] = feature[0] * FEATURE_SCALE;
        coords[1] = feature[1] * FEATURE_SCALE;
        self.inverse_transform(&coords)
    }

    pub fn to_text(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = &f64>| {
            it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER} {FORMAT_VERSION}");
        let _ = writeln!(out, "dim {}", self.dim());
        let _ = writeln!(out, "components {}", self.num_components());
        let _ = writeln!(out, "samples {}", self.num_samples);
        let _ = writeln!(out, "mean {}", join(&mut self.mean.iter()));
        let _ = writeln!(out, "eigenvalues {}", join(&mut self.eigenvalues.iter()));
        for col in self.components.column_iter() {
            let _ = writeln!(out, "component {}", join(&mut col.iter()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |reason: String| Error::parse("PCA model", reason);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut field = |key: &str| -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| err(format!("missing `{key}` line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(err(format!("expected `{key}`, found {line:?}")));
            }
            Ok(parts.map(str::to_owned).collect())
        };
        let version = field(FORMAT_HEADER)?;
        if version != [FORMAT_VERSION.to_string()] {
            return Err(err(format!("unsupported version {version:?}")));
        }
        let scalar = |v: Vec<String>, key: &str| -> Result<usize> {
            match v.as_slice() {
                [x] => x.parse().map_err(|_| err(format!("bad {key} {x:?}"))),
                _ => Err(err(format!("bad {key} line"))),
            }
        };
        let dim = scalar(field("dim")?, "dim")?;
        let k = scalar(field("components")?, "components")?;
        let num_samples = scalar(field("samples")?, "samples")?;
        let floats = |v: Vec<String>, n: usize, key: &str| -> Result<Vec<f64>> {
            let vals = v
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(format!("{key}: {e}")))?;
            if vals.len() != n || vals.iter().any(|x| !x.is_finite()) {
                return Err(err(format!("{key}: expected {n} finite values")));
            }
            Ok(vals)
        };
        let mean = floats(field("mean")?, dim, "mean")?;
        let eigenvalues = floats(field("eigenvalues")?, dim, "eigenvalues")?;
        let mut comps = Vec::with_capacity(dim * k);
        for _ in 0..k {
            comps.extend(floats(field("component")?, dim, "component")?);
        }
        if lines.next().is_some() {
            return Err(err("trailing content".into()));
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            components: DMatrix::from_vec(dim, k, comps),
            eigenvalues: DVector::from_vec(eigenvalues),
            num_samples,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Fits a PCA keeping `num_components` components.
///
/// Each component's sign is chosen so that its largest-magnitude entry is
/// positive.
pub fn pca_fit(samples: &[Vec<f64>], num_components: usize) -> Result<PcaModel> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewVectors {
            needed: 2,
            found: n,
        });
    }
    let dim = samples[0].len();
    if dim == 0 || num_components == 0 || num_components > dim {
        return Err(Error::InvalidInput(format!(
            "cannot keep {num_components} components of {dim}-dimensional data"
        )));
    }
    for s in samples {
        if s.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.len(),
            });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("PCA sample".into()));
        }
    }
    let data = DMatrix::from_fn(n, dim, |i, j| samples[i][j]);
    let mean: DVector<f64> = data.row_mean().transpose();
    let centered = DMatrix::from_fn(n, dim, |i, j| data[(i, j)] - mean[j]);
    let mut cov = centered.transpose() * &centered / (n - 1) as f64;
    cov = (&cov + cov.transpose()) * 0.5;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues =
        DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i].max(0.0)));
    let mut components = DMatrix::zeros(dim, num_components);
    for (k, &i) in order.iter().take(num_components).enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        let lead = col.iamax();
        if col[lead] < 0.0 {
            col.neg_mut();
        }
        components.set_column(k, &col);
    }
    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
        num_samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn samples_along_one_axis() {
        let samples: Vec<Vec<f64>> = (0..10).map(|i| vec![0.0, i as f64, 0.0]).collect();
        let m = pca_fit(&samples, 2).unwrap();
        let c0 = m.components().column(0);
        assert!((c0[1] - 1.0).abs() < 1e-12);
        assert!((m.explained_variance_ratio()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_are_degenerate() {
        let m = pca_fit(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]], 2).unwrap();
        assert!(m.is_degenerate());
        assert!(m.eigenvalues().iter().all(|&l| l == 0.0));
        assert_eq!(m.explained_variance_ratio(), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_too_few_samples() {
        assert!(matches!(
            pca_fit(&[vec![1.0, 2.0]], 1),
            Err(Error::TooFewVectors { .. })
        ));
    }

    fn random_model() -> (Vec<Vec<f64>>, PcaModel) {
        let mut rng = crate::rng::rng(11);
        let samples: Vec<Vec<f64>> = (0..30)
            .map(|_| {
                (0..6)
                    .map(|j| rng.sample::<f64, _>(StandardNormal) * (6 - j) as f64)
                    .collect()
            })
            .collect();
        let m = pca_fit(&samples, 3).unwrap();
        (samples, m)
    }

    #[test]
    fn projection_examples() {
        let (_, m) = random_model();
        let mean: Vec<f64> = m.mean().iter().copied().collect();
        assert_eq!(m.project(&mean).unwrap(), [0.0, 0.0]);
        let shifted: Vec<f64> = mean
            .iter()
            .zip(m.components().column(0).iter())
            .map(|(a, c)| a + 100.0 * c)
            .collect();
        let p = m.project(&shifted).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
        let back = m.unproject(p).unwrap();
        for (a, b) in back.iter().zip(&shifted) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sign_convention() {
        let (_, m) = random_model();
        for col in m.components().column_iter() {
            assert!(col[col.iamax()] > 0.0);
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let (_, m) = random_model();
        let text = m.to_text();
        assert_eq!(PcaModel::from_text(&text).unwrap(), m);
        assert!(PcaModel::from_text(&text.replace("qad-pca 1", "qad-pca 9")).is_err());
        let truncated: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(PcaModel::from_text(&truncated).is_err());
    }
}
