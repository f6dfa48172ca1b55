//! Exact classical anomaly scores.
//!
//! The Euclidean score `g(z) = |z|²` and the proximity measure
//! `f(z) = |z|² − ẑᵀ C ẑ`, with `C` the covariance of the centered training
//! vectors. `f` is available through two independent routes (the covariance
//! quadratic form and the sum of squared projections) that must agree.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance on the residual mean of a centered training set.
pub const CENTERING_TOL: f64 = 1e-6;

/// A real feature vector with at least two finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "feature vectors need d >= 2, got {}",
                components.len()
            )));
        }
        if let Some(v) = components.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("feature component {v}")));
        }
        Ok(Self(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self − other`.
    pub fn sub(&self, other: &[f64]) -> Result<FeatureVector> {
        if other.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.len(),
            });
        }
        Ok(FeatureVector(
            self.0.iter().zip(other).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Unit vector along `self`; fails for the zero vector.
    pub fn direction(&self) -> Result<Vec<f64>> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("the zero vector has no direction".into()));
        }
        Ok(self.0.iter().map(|v| v / n).collect())
    }

    fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl From<[f64; 2]> for FeatureVector {
    fn from(v: [f64; 2]) -> Self {
        FeatureVector::new(v.to_vec()).expect("finite 2-D vector")
    }
}

/// Training vectors together with the centroid that was removed from them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    vectors: Vec<FeatureVector>,
    centroid: Vec<f64>,
    centered: bool,
}

impl TrainingSet {
    /// Wraps vectors as they are; `centered` reflects the tolerance check.
    pub fn from_vectors(vectors: Vec<FeatureVector>) -> Result<Self> {
        let d = check_shape(&vectors)?;
        let centered = centering_residual(&vectors) <= CENTERING_TOL;
        Ok(Self {
            vectors,
            centroid: vec![0.0; d],
            centered,
        })
    }

    /// Caller asserts the vectors are already centered (e.g. rounded
    /// published values); no shift is applied and the centroid is zero.
    pub fn assume_centered(vectors: Vec<FeatureVector>) -> Result<Self> {
        let d = check_shape(&vectors)?;
        Ok(Self {
            vectors,
            centroid: vec![0.0; d],
            centered: true,
        })
    }

    /// Records the centroid that was removed from already-centered vectors.
    pub fn with_centroid(mut self, centroid: Vec<f64>) -> Result<Self> {
        if centroid.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: centroid.len(),
            });
        }
        if let Some(c) = centroid.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("centroid component {c}")));
        }
        self.centroid = centroid;
        Ok(self)
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// Mean that was subtracted by [`center`]; zero otherwise.
    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// True when every vector is zero (no direction information at all).
    pub fn is_degenerate(&self) -> bool {
        self.vectors.iter().all(|v| v.norm_sqr() == 0.0)
    }

    /// Shifts an incoming vector into the training frame.
    pub fn to_training_frame(&self, v: &FeatureVector) -> Result<FeatureVector> {
        v.sub(&self.centroid)
    }
}

fn check_shape(vectors: &[FeatureVector]) -> Result<usize> {
    if vectors.len() < 2 {
        return Err(Error::TooFewVectors {
            needed: 2,
            found: vectors.len(),
        });
    }
    let d = vectors[0].dim();
    if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.dim(),
        });
    }
    Ok(d)
}

/// `|Σ z_i| / Σ |z_i|`, or 0 when every vector is zero.
pub(crate) fn centering_residual(vectors: &[FeatureVector]) -> f64 {
    let d = vectors[0].dim();
    let mut sum = vec![0.0; d];
    for v in vectors {
        for (s, x) in sum.iter_mut().zip(v.components()) {
            *s += x;
        }
    }
    let total: f64 = vectors.iter().map(FeatureVector::norm).sum();
    let resid = sum.iter().map(|s| s * s).sum::<f64>().sqrt();
    if total == 0.0 {
        0.0
    } else {
        resid / total
    }
}

/// Subtracts the arithmetic mean from every vector.
pub fn center(vectors: Vec<FeatureVector>) -> Result<TrainingSet> {
    let d = check_shape(&vectors)?;
    let m = vectors.len() as f64;
    let mut centroid = vec![0.0; d];
    for v in &vectors {
        for (c, x) in centroid.iter_mut().zip(v.components()) {
            *c += x;
        }
    }
    centroid.iter_mut().for_each(|c| *c /= m);
    let vectors = vectors
        .iter()
        .map(|v| v.sub(&centroid))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainingSet {
        vectors,
        centroid,
        centered: true,
    })
}

/// Squared distance from the centroid, `|z|²`.
pub fn euclidean_score(z: &FeatureVector) -> f64 {
    z.norm_sqr()
}

/// Sample covariance `C = Σ z_i z_iᵀ / (M − 1)` and its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
    trace_factor: f64,
}

impl CovarianceMatrix {
    /// Wraps a symmetric PSD matrix (e.g. read back from a model file).
    pub fn from_entries(entries: DMatrix<f64>) -> Result<Self> {
        let d = entries.nrows();
        if entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.ncols(),
            });
        }
        for i in 0..d {
            for j in 0..d {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidInput("covariance is not symmetric".into()));
                }
            }
        }
        let min = SymmetricEigen::new(entries.clone()).eigenvalues.min();
        if min < -1e-12 {
            return Err(Error::InvalidInput(format!(
                "covariance has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            trace_factor: entries.trace(),
            entries,
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `tr C = Σ |z_i|² / (M − 1)`.
    pub fn trace_factor(&self) -> f64 {
        self.trace_factor
    }

    /// `ûᵀ C û` for a unit vector `û`.
    pub fn quadratic_form(&self, unit: &[f64]) -> f64 {
        let u = DVector::from_column_slice(unit);
        (u.transpose() * &self.entries * &u)[(0, 0)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone()).eigenvalues.min()
    }
}

/// Covariance of a centered training set.
pub fn covariance_matrix(ts: &TrainingSet) -> Result<CovarianceMatrix> {
    if !ts.is_centered() {
        return Err(Error::NotCentered {
            residual: centering_residual(ts.vectors()),
        });
    }
    Ok(covariance_matrix_unchecked(ts))
}

/// Covariance without the centering check, for callers that override it.
pub fn covariance_matrix_unchecked(ts: &TrainingSet) -> CovarianceMatrix {
    let d = ts.dim();
    let mut c = DMatrix::zeros(d, d);
    for v in ts.vectors() {
        let z = v.as_dvector();
        c += &z * z.transpose();
    }
    c /= (ts.len() - 1) as f64;
    // exact symmetry; the outer products are symmetric but rounding is not
    let c = (&c + c.transpose()) * 0.5;
    CovarianceMatrix {
        trace_factor: c.trace(),
        entries: c,
    }
}

/// `f(z) = |z|² − ẑᵀ C ẑ`.
pub fn proximity_classical(z_test: &FeatureVector, cov: &CovarianceMatrix) -> Result<f64> {
    if z_test.dim() != cov.dim() {
        return Err(Error::DimensionMismatch {
            expected: cov.dim(),
            found: z_test.dim(),
        });
    }
    let unit = z_test.direction()?;
    Ok(z_test.norm_sqr() - cov.quadratic_form(&unit))
}

/// `f(z) = |z|² − Σ (ẑᵀ z_i)² / (M − 1)`, computed without forming `C`.
pub fn proximity_via_inner_products(z_test: &FeatureVector, ts: &TrainingSet) -> Result<f64> {
    if z_test.dim() != ts.dim() {
        return Err(Error::DimensionMismatch {
            expected: ts.dim(),
            found: z_test.dim(),
        });
    }
    let unit = z_test.direction()?;
    let projected: f64 = ts
        .vectors()
        .iter()
        .map(|z| {
            let dot: f64 = z.components().iter().zip(&unit).map(|(a, b)| a * b).sum();
            dot * dot
        })
        .sum();
    Ok(z_test.norm_sqr() - projected / (ts.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(x: f64, y: f64) -> FeatureVector {
        FeatureVector::from([x, y])
    }

    pub(crate) fn violin_vectors() -> Vec<FeatureVector> {
        vec![
            fv(-0.789, 0.130),
            fv(0.751, -0.023),
            fv(0.617, 0.531),
            fv(-0.579, -0.639),
        ]
    }

    #[test]
    fn center_examples() {
        let ts = center(vec![fv(1.0, 0.0), fv(3.0, 0.0)]).unwrap();
        assert_eq!(ts.centroid(), &[2.0, 0.0]);
        assert_eq!(ts.vectors(), &[fv(-1.0, 0.0), fv(1.0, 0.0)]);

        let ts = center(violin_vectors()).unwrap();
        for (a, b) in ts.vectors().iter().zip(violin_vectors()) {
            for (x, y) in a.components().iter().zip(b.components()) {
                assert!((x - y).abs() < 1e-3);
            }
        }

        let ts = center(vec![fv(5.0, 5.0), fv(5.0, 5.0)]).unwrap();
        assert!(ts.is_degenerate());
        assert_eq!(ts.vectors()[0], fv(0.0, 0.0));
    }

    #[test]
    fn center_errors() {
        assert!(matches!(
            center(vec![fv(1.0, 1.0)]),
            Err(Error::TooFewVectors { .. })
        ));
        let v3 = FeatureVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            center(vec![fv(1.0, 1.0), v3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(FeatureVector::new(vec![1.0]).is_err());
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn violin_vectors_are_not_centered_to_tolerance() {
        // They sum to (0, -0.001), far outside the 1e-6 relative tolerance.
        let ts = TrainingSet::from_vectors(violin_vectors()).unwrap();
        assert!(!ts.is_centered());
        assert!(matches!(
            covariance_matrix(&ts),
            Err(Error::NotCentered { .. })
        ));
        assert!(TrainingSet::assume_centered(violin_vectors())
            .unwrap()
            .is_centered());
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_score(&fv(0.0, 0.0)), 0.0);
        assert!((euclidean_score(&fv(0.6, 0.8)) - 1.0).abs() < 1e-15);
        assert_eq!(euclidean_score(&fv(3.0, 4.0)), 25.0);
    }

    #[test]
    fn covariance_examples() {
        let ts = TrainingSet::from_vectors(vec![
            fv(1.0, 0.0),
            fv(-1.0, 0.0),
            fv(0.0, 1.0),
            fv(0.0, -1.0),
        ])
        .unwrap();
        let c = covariance_matrix(&ts).unwrap();
        assert!((c.entries() - DMatrix::identity(2, 2) * (2.0 / 3.0)).amax() < 1e-15);
        assert!((c.trace_factor() - 4.0 / 3.0).abs() < 1e-15);

        let ts = TrainingSet::from_vectors(vec![fv(1.0, 0.0), fv(-1.0, 0.0)]).unwrap();
        let c = covariance_matrix(&ts).unwrap();
        assert_eq!(
            c.entries(),
            &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn covariance_of_violin_vectors() {
        // Direct summation: Σ z zᵀ / 3 over the four listed vectors.
        let c =
            covariance_matrix(&TrainingSet::assume_centered(violin_vectors()).unwrap()).unwrap();
        let e = c.entries();
        assert!((e[(0, 0)] - 0.634150666667).abs() < 1e-9);
        assert!((e[(0, 1)] - 0.192588333333).abs() < 1e-9);
        assert!((e[(1, 1)] - 0.235903666667).abs() < 1e-9);
        assert!((c.trace_factor() - 0.870054333333).abs() < 1e-9);
        assert!(c.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn proximity_examples() {
        let iso = CovarianceMatrix::from_entries(DMatrix::identity(2, 2) * (2.0 / 3.0)).unwrap();
        let f = proximity_classical(&fv(0.6, 0.8), &iso).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-12);

        let flat =
            CovarianceMatrix::from_entries(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]))
                .unwrap();
        for t in [0.5, 1.0, 3.0] {
            assert!((proximity_classical(&fv(0.0, t), &flat).unwrap() - t * t).abs() < 1e-12);
        }

        let violin =
            covariance_matrix_unchecked(&TrainingSet::assume_centered(violin_vectors()).unwrap());
        let f = proximity_classical(&fv(1.0, 0.0), &violin).unwrap();
        assert!((f - 0.365849333333).abs() < 1e-9);

        assert!(matches!(
            proximity_classical(&fv(0.0, 0.0), &iso),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn inner_product_route_examples() {
        let ts = TrainingSet::from_vectors(vec![fv(1.0, 0.0), fv(-1.0, 0.0)]).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let f = proximity_via_inner_products(&fv(t, 0.0), &ts).unwrap();
            assert!((f - (t * t - 2.0)).abs() < 1e-12);
        }
        let ts = TrainingSet::assume_centered(violin_vectors()).unwrap();
        let c = covariance_matrix(&ts).unwrap();
        for z in [fv(0.3, -0.2), fv(-1.5, 0.7), fv(0.01, 2.0)] {
            let a = proximity_classical(&z, &c).unwrap();
            let b = proximity_via_inner_products(&z, &ts).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        assert!(proximity_via_inner_products(&fv(0.0, 0.0), &ts).is_err());
    }
}
