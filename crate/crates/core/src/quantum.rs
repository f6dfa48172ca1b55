//! Dense state-vector and density-matrix simulation for small registers.
//!
//! Qubit 0 is the most significant bit of the basis index. For the 3-qubit
//! processor this gives `m = 4·e + 2·c + n` with qubit 0 the electron (data),
//! qubit 1 the carbon and qubit 2 the nitrogen (index register).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 6;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_SLACK: f64 = 1e-10;

/// Position of a qubit inside a register (0 = most significant bit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitIndex(pub usize);

impl QubitIndex {
    fn check(self, num_qubits: usize) -> Result<Self> {
        if self.0 < num_qubits {
            Ok(self)
        } else {
            Err(Error::InvalidQubit {
                index: self.0,
                num_qubits,
            })
        }
    }

    /// Bit mask of this qubit inside a basis index of an `num_qubits` register.
    fn mask(self, num_qubits: usize) -> usize {
        1 << (num_qubits - 1 - self.0)
    }
}

/// A control condition: the gate fires only where `qubit` reads `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: QubitIndex,
    pub value: bool,
}

impl Control {
    pub fn new(qubit: usize, value: bool) -> Self {
        Self {
            qubit: QubitIndex(qubit),
            value,
        }
    }
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::UnsupportedQubitCount(num_qubits))
    }
}

/// Pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes, checking the length is a power of two and the norm is 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidState(format!(
                "{dim} amplitudes is not a qubit register"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes real amplitudes before wrapping them.
    pub fn from_real_unnormalized(values: &[f64]) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        Self::from_amplitudes(
            values
                .iter()
                .map(|v| Complex64::new(v / norm, 0.0))
                .collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; `self` occupies the leading (most significant) qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_qubit_count(num_qubits)?;
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Applies a 2×2 unitary to `target` on the subspace selected by `controls`.
    fn apply_single(
        &self,
        controls: &[Control],
        target: QubitIndex,
        gate: [[Complex64; 2]; 2],
    ) -> Result<StateVector> {
        let n = self.num_qubits;
        let target = target.check(n)?;
        let mut ctrl_mask = 0usize;
        let mut ctrl_value = 0usize;
        for c in controls {
            let q = c.qubit.check(n)?;
            if q == target {
                return Err(Error::OverlappingQubits(q.0));
            }
            let m = q.mask(n);
            if ctrl_mask & m != 0 {
                return Err(Error::OverlappingQubits(q.0));
            }
            ctrl_mask |= m;
            if c.value {
                ctrl_value |= m;
            }
        }
        let t = target.mask(n);
        let mut out = self.amplitudes.clone();
        for i0 in (0..out.len()).filter(|i| i & t == 0 && i & ctrl_mask == ctrl_value) {
            let i1 = i0 | t;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = gate[0][0] * a0 + gate[0][1] * a1;
            out[i1] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        Ok(StateVector {
            num_qubits: n,
            amplitudes: out,
        })
    }

    /// `R_y(angle) = exp(-i σ_y angle / 2)` on `target`.
    pub fn apply_ry(&self, target: QubitIndex, angle: f64) -> Result<StateVector> {
        self.apply_controlled_ry(&[], target, angle)
    }

    /// `R_y(angle)` on `target` wherever every control reads its required value.
    pub fn apply_controlled_ry(
        &self,
        controls: &[Control],
        target: QubitIndex,
        angle: f64,
    ) -> Result<StateVector> {
        self.apply_single(controls, target, ry_matrix(angle))
    }

    pub fn apply_hadamard(&self, target: QubitIndex) -> Result<StateVector> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(&[], target, [[h, h], [h, -h]])
    }

    /// Swaps qubits `a` and `b` where `control` reads 1 (Fredkin gate).
    pub fn apply_controlled_swap(
        &self,
        control: QubitIndex,
        a: QubitIndex,
        b: QubitIndex,
    ) -> Result<StateVector> {
        let n = self.num_qubits;
        let (c, a, b) = (control.check(n)?, a.check(n)?, b.check(n)?);
        if c == a || c == b {
            return Err(Error::OverlappingQubits(c.0));
        }
        if a == b {
            return Err(Error::OverlappingQubits(a.0));
        }
        let (cm, am, bm) = (c.mask(n), a.mask(n), b.mask(n));
        let mut out = self.amplitudes.clone();
        for i in (0..out.len()).filter(|i| i & cm != 0 && i & am != 0 && i & bm == 0) {
            let j = (i & !am) | bm;
            out.swap(i, j);
        }
        Ok(StateVector {
            num_qubits: n,
            amplitudes: out,
        })
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let psi = DMatrix::from_column_slice(self.amplitudes.len(), 1, &self.amplitudes);
        DensityMatrix {
            num_qubits: self.num_qubits,
            entries: &psi * psi.adjoint(),
        }
    }
}

/// Real 2×2 rotation matrix of `R_y(angle)`.
pub fn ry_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Mixed state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "density matrix is {}x{}",
                dim,
                entries.ncols()
            )));
        }
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidState(format!(
                "dimension {dim} is not a qubit register"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let dm = Self {
            num_qubits,
            entries,
        };
        dm.validate()?;
        Ok(dm)
    }

    /// Real symmetric matrix as a density matrix.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(*v, 0.0);
            }
        }
        Self::new(m)
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1 << num_qubits;
        Ok(Self {
            num_qubits,
            entries: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// Checks the density-matrix invariants within numerical slack.
    pub fn validate(&self) -> Result<()> {
        let m = &self.entries;
        let dim = m.nrows();
        for i in 0..dim {
            for j in 0..dim {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if !d.is_finite() || d > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({i},{j}) by {d:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_SLACK {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries)
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum()
    }

    /// Diagonal of ρ in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(&self.entries))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: psi.num_qubits(),
            });
        }
        let v = DMatrix::from_column_slice(psi.amplitudes.len(), 1, &psi.amplitudes);
        Ok((v.adjoint() * &self.entries * &v)[(0, 0)].re)
    }

    /// Reduced state on the `keep` qubits, in their register order.
    pub fn partial_trace(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let n = self.num_qubits;
        let mut kept: Vec<QubitIndex> = keep.iter().map(|q| q.check(n)).collect::<Result<_>>()?;
        kept.sort();
        if let Some(w) = kept.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::OverlappingQubits(w[0].0));
        }
        let traced: Vec<QubitIndex> = (0..n)
            .map(QubitIndex)
            .filter(|q| !kept.contains(q))
            .collect();

        // Scatter the bits of a sub-register index into full-register positions.
        let embed = |qubits: &[QubitIndex], sub: usize| -> usize {
            let k = qubits.len();
            qubits.iter().enumerate().fold(0, |acc, (pos, q)| {
                if sub >> (k - 1 - pos) & 1 == 1 {
                    acc | q.mask(n)
                } else {
                    acc
                }
            })
        };

        let kd = 1 << kept.len();
        let td = 1 << traced.len();
        let mut out = DMatrix::zeros(kd, kd);
        for r in 0..kd {
            let rbase = embed(&kept, r);
            for c in 0..kd {
                let cbase = embed(&kept, c);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..td {
                    let tbits = embed(&traced, t);
                    acc += self.entries[(rbase | tbits, cbase | tbits)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityMatrix {
            num_qubits: kept.len(),
            entries: out,
        })
    }

    /// Uhlmann fidelity `tr √(√ρ σ √ρ)`.
    pub fn fidelity(&self, sigma: &DensityMatrix) -> Result<f64> {
        if self.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma.dim(),
            });
        }
        let sqrt_rho = psd_sqrt(&self.entries);
        let inner = &sqrt_rho * &sigma.entries * &sqrt_rho;
        let f: f64 = SymmetricEigen::new(hermitian_part(&inner))
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .sum();
        Ok(f.clamp(0.0, 1.0))
    }

    /// `U ρ U†` with a 2×2 unitary acting on one qubit.
    pub fn apply_single(&self, target: QubitIndex, gate: [[Complex64; 2]; 2]) -> Result<Self> {
        let n = self.num_qubits;
        let t = target.check(n)?.mask(n);
        let dim = self.dim();
        let mut u = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let bit = usize::from(i & t != 0);
            let i0 = i & !t;
            u[(i0, i)] = gate[0][bit];
            u[(i0 | t, i)] = gate[1][bit];
        }
        Ok(Self {
            num_qubits: n,
            entries: &u * &self.entries * u.adjoint(),
        })
    }
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Square root of a PSD matrix with negative eigenvalues clamped to zero.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let roots = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    &eig.eigenvectors * roots * eig.eigenvectors.adjoint()
}

/// Anything that can report the probability of reading a bit on a qubit.
pub trait Measurable {
    fn num_qubits(&self) -> usize;

    /// Probability of each computational basis state.
    fn basis_probabilities(&self) -> Vec<f64>;

    /// Probability that `qubit` reads `value`.
    fn measure_population(&self, qubit: QubitIndex, value: bool) -> Result<f64> {
        let n = self.num_qubits();
        let mask = qubit.check(n)?.mask(n);
        Ok(self
            .basis_probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == value)
            .map(|(_, p)| p)
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }
}

impl Measurable for StateVector {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl Measurable for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        self.populations()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expected: &[f64]) {
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - c(*e)).norm() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn ry_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_amps(&zero.apply_ry(QubitIndex(0), 0.0).unwrap(), &[1.0, 0.0]);
        assert_amps(&zero.apply_ry(QubitIndex(0), PI).unwrap(), &[0.0, 1.0]);
        assert_amps(
            &zero.apply_ry(QubitIndex(0), PI / 2.0).unwrap(),
            &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        );
        assert!(matches!(
            zero.apply_ry(QubitIndex(1), 1.0),
            Err(Error::InvalidQubit { .. })
        ));
    }

    #[test]
    fn controlled_ry_examples() {
        let s00 = StateVector::zero(2).unwrap();
        let s10 = StateVector::basis(2, 0b10).unwrap();
        let ctrl = [Control::new(0, false)];
        let out = s00.apply_controlled_ry(&ctrl, QubitIndex(1), PI).unwrap();
        assert_amps(&out, &[0.0, 1.0, 0.0, 0.0]);
        let out = s10.apply_controlled_ry(&ctrl, QubitIndex(1), PI).unwrap();
        assert_amps(&out, &[0.0, 0.0, 1.0, 0.0]);
        let out = s00
            .apply_controlled_ry(&ctrl, QubitIndex(1), PI / 2.0)
            .unwrap();
        assert_amps(&out, &[(PI / 4.0).cos(), (PI / 4.0).sin(), 0.0, 0.0]);
    }

    #[test]
    fn controlled_ry_rejects_overlap() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply_controlled_ry(&[Control::new(1, true)], QubitIndex(1), 1.0),
            Err(Error::OverlappingQubits(1))
        ));
        assert!(matches!(
            s.apply_controlled_ry(
                &[Control::new(0, true), Control::new(0, false)],
                QubitIndex(1),
                1.0
            ),
            Err(Error::OverlappingQubits(0))
        ));
    }

    #[test]
    fn density_matrix_examples() {
        let rho = StateVector::zero(1).unwrap().to_density_matrix();
        assert_eq!(rho.get(0, 0), c(1.0));
        assert_eq!(rho.get(1, 1), c(0.0));

        let plus = StateVector::zero(1)
            .unwrap()
            .apply_ry(QubitIndex(0), PI / 2.0)
            .unwrap()
            .to_density_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((plus.get(i, j) - c(0.5)).norm() < 1e-12);
            }
        }
        assert!((plus.trace() - 1.0).abs() < 1e-12);
        assert!((plus.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let plus = StateVector::from_real_unnormalized(&[1.0, 1.0]).unwrap();
        let zero = StateVector::zero(1).unwrap();
        let product = zero.tensor(&plus).unwrap().to_density_matrix();
        let reduced = product.partial_trace(&[QubitIndex(1)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((reduced.get(i, j) - c(0.5)).norm() < 1e-12);
            }
        }

        let bell = StateVector::from_real_unnormalized(&[1.0, 0.0, 0.0, 1.0])
            .unwrap()
            .to_density_matrix();
        for q in 0..2 {
            let r = bell.partial_trace(&[QubitIndex(q)]).unwrap();
            assert!((r.get(0, 0) - c(0.5)).norm() < 1e-12);
            assert!((r.get(1, 1) - c(0.5)).norm() < 1e-12);
            assert!(r.get(0, 1).norm() < 1e-12);
        }
        assert!(matches!(bell.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn partial_trace_keeps_register_order() {
        // |0⟩|1⟩|+⟩: keeping qubits {2, 0} must give |0⟩⊗|+⟩ in (0, 2) order.
        let s = StateVector::from_real_unnormalized(&[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
            .unwrap()
            .to_density_matrix();
        let r = s.partial_trace(&[QubitIndex(2), QubitIndex(0)]).unwrap();
        let expect = [
            [0.5, 0.5, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [0.0; 4],
            [0.0; 4],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((r.get(i, j) - c(expect[i][j])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1).unwrap().to_density_matrix();
        let one = StateVector::basis(1, 1).unwrap().to_density_matrix();
        assert!((zero.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.fidelity(&one).unwrap().abs() < 1e-12);
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            zero.fidelity(&two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn population_examples() {
        let s = StateVector::zero(3).unwrap();
        assert_eq!(s.measure_population(QubitIndex(0), false).unwrap(), 1.0);
        let plus = StateVector::from_real_unnormalized(&[1.0, 1.0]).unwrap();
        assert!((plus.measure_population(QubitIndex(0), false).unwrap() - 0.5).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((mixed.measure_population(QubitIndex(0), true).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn controlled_swap_exchanges_qubits() {
        // |1⟩|0⟩|1⟩ -> |1⟩|1⟩|0⟩
        let s = StateVector::basis(3, 0b101).unwrap();
        let out = s
            .apply_controlled_swap(QubitIndex(0), QubitIndex(1), QubitIndex(2))
            .unwrap();
        assert_eq!(out.amplitudes()[0b110], c(1.0));
        // control off: untouched
        let s = StateVector::basis(3, 0b001).unwrap();
        let out = s
            .apply_controlled_swap(QubitIndex(0), QubitIndex(1), QubitIndex(2))
            .unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(DensityMatrix::from_real(&[&[0.7, 0.0], &[0.0, 0.7]]).is_err());
        assert!(DensityMatrix::from_real(&[&[0.5, 0.1], &[0.2, 0.5]]).is_err());
        assert!(DensityMatrix::from_real(&[&[1.2, 0.0], &[0.0, -0.2]]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::zero(7).is_err());
    }
}
