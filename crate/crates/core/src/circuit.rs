//! The anomaly-detection circuit.
//!
//! Training vectors are loaded into a data register, entangled with an index
//! register whose amplitudes are `√p_i = |z_i| / √Σ|z_j|²`:
//!
//! ```text
//! |Ψ⟩ = Σ_i √p_i |i⟩ |ψ_i⟩,   ρ_cov = tr_index |Ψ⟩⟨Ψ| = C / tr C
//! ```
//!
//! so that `f(z) = |z|² − tr C · ⟨ψ_z|ρ_cov|ψ_z⟩` can be read from a single
//! population after undoing the test-vector encoding, or from a SWAP test.
//!
//! Register layout: data qubits first (qubit 0 is the data MSB), index qubits
//! after. For four 2-D vectors this is qubit 0 = electron, 1 = carbon,
//! 2 = nitrogen, and training vector `i` (0-based) sits at index `|c n⟩` with
//! `i = 2c + n`.

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::oracle::{FeatureVector, TrainingSet};
use crate::quantum::{Control, DensityMatrix, Measurable, QubitIndex, StateVector, MAX_QUBITS};
use crate::readout::{self, Calibration, LuminescenceConfig};
use crate::rng;

/// Number of qubits needed to address `n` slots.
fn qubits_for(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros().max(1) as usize
}

/// Normalized module lengths of the training vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    /// `p_i = |z_i|² / Σ|z_j|²`.
    pub p: Vec<f64>,
    /// `tr C = Σ|z_j|² / (M − 1)`.
    pub trace_factor: f64,
    /// `|z_i|`.
    pub lengths: Vec<f64>,
}

pub fn compute_weights(ts: &TrainingSet) -> Result<Weights> {
    let sq: Vec<f64> = ts.vectors().iter().map(FeatureVector::norm_sqr).collect();
    let total: f64 = sq.iter().sum();
    if total == 0.0 {
        return Err(Error::Degenerate("every training vector is zero".into()));
    }
    Ok(Weights {
        p: sq.iter().map(|s| s / total).collect(),
        trace_factor: total / (ts.len() - 1) as f64,
        lengths: sq.iter().map(|s| s.sqrt()).collect(),
    })
}

/// Angles of the two-qubit index preparation
/// `C-ROT(γ) · (R_y^C(α) ⊗ R_y^N(β))`, where `C-ROT(γ)` rotates the
/// nitrogen by `γ` when the carbon reads 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Closed-form inversion of the index preparation for four weights.
///
/// A branch with zero probability leaves its angle undetermined; it is set to 0.
pub fn solve_index_angles(p: [f64; 4]) -> IndexAngles {
    let sq = p.map(|v| v.max(0.0).sqrt());
    let alpha = 2.0 * (p[0] + p[1]).clamp(0.0, 1.0).sqrt().acos();
    // atan2(0, 0) = 0 handles the degenerate branches.
    let beta_plus_gamma = 2.0 * sq[1].atan2(sq[0]);
    let beta = 2.0 * sq[3].atan2(sq[2]);
    IndexAngles {
        alpha,
        beta,
        gamma: beta_plus_gamma - beta,
    }
}

/// `θ = 2·atan2(z₂, z₁)`, so that `R_y(θ)|0⟩ ∝ (z₁, z₂)` in every quadrant.
pub fn encoding_angle(z: &FeatureVector) -> Result<f64> {
    if z.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: z.dim(),
        });
    }
    if z.norm_sqr() == 0.0 {
        return Err(Error::Degenerate("cannot encode the zero vector".into()));
    }
    let c = z.components();
    Ok(2.0 * c[1].atan2(c[0]))
}

/// Binary tree of `R_y` angles that loads a real vector as amplitudes.
///
/// Level `l` holds `2^l` angles; angle `j` rotates register qubit `l`
/// conditioned on qubits `0..l` reading the bits of `j`. Inner levels split
/// the norm between halves, the last level carries the signs.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingTree {
    levels: Vec<Vec<f64>>,
}

impl LoadingTree {
    /// Builds the tree for `values`, zero-padded to the next power of two.
    /// A zero vector yields all-zero angles (the register stays in `|0…0⟩`).
    pub fn for_amplitudes(values: &[f64]) -> Self {
        let k = qubits_for(values.len());
        let mut padded = values.to_vec();
        padded.resize(1 << k, 0.0);
        let levels = (0..k)
            .map(|l| {
                let block = 1 << (k - l);
                (0..1 << l)
                    .map(|j| {
                        let chunk = &padded[j * block..(j + 1) * block];
                        if l == k - 1 {
                            2.0 * chunk[1].atan2(chunk[0])
                        } else {
                            let (left, right) = chunk.split_at(block / 2);
                            let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
                            2.0 * norm(right).atan2(norm(left))
                        }
                    })
                    .collect()
            })
            .collect();
        Self { levels }
    }

    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        for (l, level) in levels.iter().enumerate() {
            if level.len() != 1 << l {
                return Err(Error::InvalidInput(format!(
                    "loading tree level {l} has {} angles",
                    level.len()
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn num_qubits(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Amplitudes the tree produces from `|0…0⟩`, evaluated in closed form.
    pub fn synthesize(&self) -> Vec<f64> {
        let mut amps = vec![1.0];
        for level in &self.levels {
            amps = amps
                .iter()
                .zip(level)
                .flat_map(|(a, theta)| {
                    let (s, c) = (theta / 2.0).sin_cos();
                    [a * c, a * s]
                })
                .collect();
        }
        amps
    }

    fn branch_controls(register: &[QubitIndex], level: usize, branch: usize) -> Vec<Control> {
        (0..level)
            .map(|q| Control {
                qubit: register[q],
                value: branch >> (level - 1 - q) & 1 == 1,
            })
            .collect()
    }

    /// Applies the loading network on `register`, gated by `extra` controls.
    pub fn apply(
        &self,
        state: &StateVector,
        register: &[QubitIndex],
        extra: &[Control],
    ) -> Result<StateVector> {
        self.check_register(register)?;
        let mut s = state.clone();
        for (l, level) in self.levels.iter().enumerate() {
            for (j, &theta) in level.iter().enumerate() {
                let mut controls = Self::branch_controls(register, l, j);
                controls.extend_from_slice(extra);
                s = s.apply_controlled_ry(&controls, register[l], theta)?;
            }
        }
        Ok(s)
    }

    /// Applies the inverse network (`U†`): reversed order, negated angles.
    pub fn apply_inverse(
        &self,
        state: &StateVector,
        register: &[QubitIndex],
    ) -> Result<StateVector> {
        self.check_register(register)?;
        let mut s = state.clone();
        for (l, level) in self.levels.iter().enumerate().rev() {
            for (j, &theta) in level.iter().enumerate() {
                let controls = Self::branch_controls(register, l, j);
                s = s.apply_controlled_ry(&controls, register[l], -theta)?;
            }
        }
        Ok(s)
    }

    fn check_register(&self, register: &[QubitIndex]) -> Result<()> {
        if register.len() != self.levels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.levels.len(),
                found: register.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum IndexLoader {
    /// Two index qubits: the hardware-native three-angle preparation.
    ThreeAngle(IndexAngles),
    Tree(LoadingTree),
}

/// Everything needed to prepare the training state and score test vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingModel {
    weights: Weights,
    data_dim: usize,
    data_qubits: usize,
    index_qubits: usize,
    index: IndexLoader,
    encodings: Vec<LoadingTree>,
}

impl TrainingModel {
    /// Solves every circuit parameter for a centered training set.
    pub fn new(ts: &TrainingSet) -> Result<Self> {
        if !ts.is_centered() {
            return Err(Error::NotCentered {
                residual: crate::oracle::centering_residual(ts.vectors()),
            });
        }
        let weights = compute_weights(ts)?;
        let data_dim = ts.dim();
        let data_qubits = qubits_for(data_dim);
        let index_qubits = qubits_for(ts.len());
        if data_qubits + index_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(data_qubits + index_qubits));
        }
        let index = if index_qubits == 2 {
            let mut p = [0.0; 4];
            p[..weights.p.len()].copy_from_slice(&weights.p);
            IndexLoader::ThreeAngle(solve_index_angles(p))
        } else {
            let amps: Vec<f64> = weights.p.iter().map(|p| p.sqrt()).collect();
            IndexLoader::Tree(LoadingTree::for_amplitudes(&amps))
        };
        let encodings = ts
            .vectors()
            .iter()
            .map(|z| LoadingTree::for_amplitudes(z.components()))
            .collect::<Vec<_>>();
        let model = Self {
            weights,
            data_dim,
            data_qubits,
            index_qubits,
            index,
            encodings,
        };
        model.check_index_synthesis()?;
        Ok(model)
    }

    fn check_index_synthesis(&self) -> Result<()> {
        let amps = self.index_tree().synthesize();
        for (i, a) in amps.iter().enumerate() {
            let want = self.weights.p.get(i).map_or(0.0, |p| p.sqrt());
            if (a - want).abs() > 1e-10 {
                return Err(Error::Degenerate(format!(
                    "index preparation misses √p_{i}: {a} vs {want}"
                )));
            }
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights.p
    }

    pub fn trace_factor(&self) -> f64 {
        self.weights.trace_factor
    }

    pub fn module_lengths(&self) -> &[f64] {
        &self.weights.lengths
    }

    pub fn num_vectors(&self) -> usize {
        self.weights.p.len()
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn num_qubits(&self) -> usize {
        self.data_qubits + self.index_qubits
    }

    pub fn data_register(&self) -> Vec<QubitIndex> {
        (0..self.data_qubits).map(QubitIndex).collect()
    }

    pub fn index_register(&self) -> Vec<QubitIndex> {
        (self.data_qubits..self.num_qubits())
            .map(QubitIndex)
            .collect()
    }

    /// `(α, β, γ)` when the index register has two qubits.
    pub fn index_angles(&self) -> Option<IndexAngles> {
        match self.index {
            IndexLoader::ThreeAngle(a) => Some(a),
            IndexLoader::Tree(_) => None,
        }
    }

    /// The index preparation expressed as a loading tree.
    pub fn index_tree(&self) -> LoadingTree {
        match &self.index {
            IndexLoader::ThreeAngle(a) => LoadingTree {
                levels: vec![vec![a.alpha], vec![a.beta + a.gamma, a.beta]],
            },
            IndexLoader::Tree(t) => t.clone(),
        }
    }

    /// `θ_i` per training vector, for 2-D data.
    pub fn encoding_angles(&self) -> Option<Vec<f64>> {
        (self.data_qubits == 1).then(|| self.encodings.iter().map(|t| t.levels[0][0]).collect())
    }

    pub fn encodings(&self) -> &[LoadingTree] {
        &self.encodings
    }

    fn test_tree(&self, z_test: &FeatureVector) -> Result<LoadingTree> {
        if z_test.dim() != self.data_dim {
            return Err(Error::DimensionMismatch {
                expected: self.data_dim,
                found: z_test.dim(),
            });
        }
        if z_test.norm_sqr() == 0.0 {
            return Err(Error::Degenerate(
                "the zero test vector has no direction".into(),
            ));
        }
        Ok(LoadingTree::for_amplitudes(z_test.components()))
    }
}

/// Prepares `|Ψ⟩ = Σ √p_i |i⟩|ψ_i⟩` gate by gate from `|0…0⟩`.
pub fn build_training_state(model: &TrainingModel) -> Result<StateVector> {
    let index = model.index_register();
    let data = model.data_register();
    let mut s = StateVector::zero(model.num_qubits())?;
    s = match &model.index {
        IndexLoader::ThreeAngle(a) => {
            let (carbon, nitrogen) = (index[0], index[1]);
            s.apply_ry(carbon, a.alpha)?
                .apply_ry(nitrogen, a.beta)?
                .apply_controlled_ry(
                    &[Control {
                        qubit: carbon,
                        value: false,
                    }],
                    nitrogen,
                    a.gamma,
                )?
        }
        IndexLoader::Tree(t) => t.apply(&s, &index, &[])?,
    };
    let k = index.len();
    for (i, tree) in model.encodings.iter().enumerate() {
        let selector: Vec<Control> = index
            .iter()
            .enumerate()
            .map(|(pos, &q)| Control {
                qubit: q,
                value: i >> (k - 1 - pos) & 1 == 1,
            })
            .collect();
        s = tree.apply(&s, &data, &selector)?;
    }
    Ok(s)
}

/// `ρ_cov`: the data register after discarding the index register.
pub fn covariance_density(model: &TrainingModel) -> Result<DensityMatrix> {
    build_training_state(model)?
        .to_density_matrix()
        .partial_trace(&model.data_register())
}

/// How an overlap was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProximityMethod {
    /// `⟨ψ|ρ_cov|ψ⟩` evaluated directly on the density matrix.
    Exact,
    InverseRotation,
    SwapTest,
    PhotonReadout,
}

impl ProximityMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ProximityMethod::Exact => "exact",
            ProximityMethod::InverseRotation => "inverse-rotation",
            ProximityMethod::SwapTest => "swap-test",
            ProximityMethod::PhotonReadout => "photon-readout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximityResult {
    /// `f = |z|² − tr C · overlap`.
    pub f_value: f64,
    /// `⟨ψ_test|ρ_cov|ψ_test⟩`, clamped to `[0, 1]`.
    pub overlap: f64,
    /// Overlap before clamping (differs only for noisy readouts).
    pub raw_overlap: f64,
    pub method: ProximityMethod,
    pub shots: Option<u64>,
}

impl ProximityResult {
    fn new(
        model: &TrainingModel,
        z: &FeatureVector,
        raw_overlap: f64,
        method: ProximityMethod,
        shots: Option<u64>,
    ) -> Self {
        let overlap = raw_overlap.clamp(0.0, 1.0);
        Self {
            f_value: z.norm_sqr() - model.trace_factor() * overlap,
            overlap,
            raw_overlap,
            method,
            shots,
        }
    }
}

/// `f` from the exact reduced density matrix.
pub fn proximity_exact(model: &TrainingModel, z_test: &FeatureVector) -> Result<ProximityResult> {
    let tree = model.test_tree(z_test)?;
    let psi = StateVector::from_real_unnormalized(&tree.synthesize())?;
    let overlap = covariance_density(model)?.expectation(&psi)?;
    Ok(ProximityResult::new(
        model,
        z_test,
        overlap,
        ProximityMethod::Exact,
        None,
    ))
}

/// Readout of the population after `U_test†`.
#[derive(Debug, Clone, Copy)]
pub enum InverseReadout<'a> {
    Exact,
    /// Four-sequence photon counting; needs the 3-qubit register.
    Photon(&'a LuminescenceConfig),
}

/// Undoes the test encoding on the data register and reads `P(data = 0…0)`.
pub fn proximity_inverse_rotation(
    model: &TrainingModel,
    z_test: &FeatureVector,
    readout: InverseReadout<'_>,
) -> Result<ProximityResult> {
    let tree = model.test_tree(z_test)?;
    let data = model.data_register();
    let rotated = tree.apply_inverse(&build_training_state(model)?, &data)?;
    match readout {
        InverseReadout::Exact => {
            let p0 = data_register_zero_probability(&rotated, &data);
            Ok(ProximityResult::new(
                model,
                z_test,
                p0,
                ProximityMethod::InverseRotation,
                None,
            ))
        }
        InverseReadout::Photon(cfg) => {
            if model.num_qubits() != 3 {
                return Err(Error::InvalidInput(format!(
                    "photon readout models the 3-qubit register, model uses {}",
                    model.num_qubits()
                )));
            }
            let counts = readout::simulate_counts(&rotated.to_density_matrix(), cfg)?;
            let estimate = readout::extract_p0(&counts, &Calibration::from_config(cfg)?)?;
            Ok(ProximityResult::new(
                model,
                z_test,
                estimate.raw,
                ProximityMethod::PhotonReadout,
                Some(cfg.shots),
            ))
        }
    }
}

fn data_register_zero_probability(state: &StateVector, data: &[QubitIndex]) -> f64 {
    if let [q] = data {
        return state.measure_population(*q, false).unwrap_or(0.0);
    }
    let n = state.num_qubits();
    let mask = data.iter().fold(0usize, |m, q| m | 1 << (n - 1 - q.0));
    state
        .basis_probabilities()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask == 0)
        .map(|(_, p)| p)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Ancilla readout of the SWAP test.
#[derive(Debug, Clone, Copy)]
pub enum SwapReadout {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

/// Probability that the SWAP-test ancilla reads 0.
pub fn swap_test_ancilla_zero(model: &TrainingModel, z_test: &FeatureVector) -> Result<f64> {
    let tree = model.test_tree(z_test)?;
    let k = model.data_qubits;
    let test_reg: Vec<QubitIndex> = (1..=k).map(QubitIndex).collect();
    let head = tree.apply(&StateVector::zero(1 + k)?, &test_reg, &[])?;
    // ancilla | test register | data register | index register
    let mut s = head.tensor(&build_training_state(model)?)?;
    let ancilla = QubitIndex(0);
    s = s.apply_hadamard(ancilla)?;
    for j in 0..k {
        s = s.apply_controlled_swap(ancilla, QubitIndex(1 + j), QubitIndex(1 + k + j))?;
    }
    s = s.apply_hadamard(ancilla)?;
    s.measure_population(ancilla, false)
}

/// Overlap from the SWAP test: `P(0) = (1 + ⟨ψ|ρ_cov|ψ⟩) / 2`.
pub fn proximity_swap_test(
    model: &TrainingModel,
    z_test: &FeatureVector,
    readout: SwapReadout,
) -> Result<ProximityResult> {
    let p0 = swap_test_ancilla_zero(model, z_test)?;
    let (p0, shots) = match readout {
        SwapReadout::Exact => (p0, None),
        SwapReadout::Sampled { shots, seed } => (sample_fraction(p0, shots, seed)?, Some(shots)),
    };
    Ok(ProximityResult::new(
        model,
        z_test,
        2.0 * p0 - 1.0,
        ProximityMethod::SwapTest,
        shots,
    ))
}

fn sample_fraction(p: f64, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let dist =
        Binomial::new(shots, p.clamp(0.0, 1.0)).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(dist.sample(&mut rng::rng(seed)) as f64 / shots as f64)
}

#[derive(Debug, Clone, Copy)]
pub enum TomographyMode {
    Exact,
    Sampled { shots_per_basis: u64, seed: u64 },
}

/// Pauli expectation values of a one-qubit state, `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
pub type BlochVector = [f64; 3];

/// Reconstructs the data-qubit state from measurements in the X, Y and Z bases.
///
/// In sampled mode the Bloch vector is shrunk back onto the unit ball if shot
/// noise pushes it outside, so the result is always a valid density matrix.
pub fn tomography_data_qubit(model: &TrainingModel, mode: TomographyMode) -> Result<DensityMatrix> {
    if model.data_qubits != 1 {
        return Err(Error::InvalidInput(
            "single-qubit tomography needs 2-D data".into(),
        ));
    }
    let rho = covariance_density(model)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| num_complex::Complex64::new(re, im);
    // Basis changes that map the ±1 eigenstates of X and Y onto |0⟩, |1⟩.
    let to_x = [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
    let to_y = [[c(h, 0.0), c(0.0, -h)], [c(h, 0.0), c(0.0, h)]];
    let q = QubitIndex(0);
    let p_plus = [
        rho.apply_single(q, to_x)?.measure_population(q, false)?,
        rho.apply_single(q, to_y)?.measure_population(q, false)?,
        rho.measure_population(q, false)?,
    ];
    let mut bloch: BlochVector = match mode {
        TomographyMode::Exact => p_plus.map(|p| 2.0 * p - 1.0),
        TomographyMode::Sampled {
            shots_per_basis,
            seed,
        } => {
            let mut b = [0.0; 3];
            for (k, p) in p_plus.iter().enumerate() {
                let f = sample_fraction(*p, shots_per_basis, rng::item_seed(seed, k as u64))?;
                b[k] = 2.0 * f - 1.0;
            }
            b
        }
    };
    let r = bloch.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r > 1.0 {
        bloch.iter_mut().for_each(|v| *v /= r);
    }
    density_from_bloch(bloch)
}

/// `ρ = (I + x σx + y σy + z σz) / 2`.
pub fn density_from_bloch([x, y, z]: BlochVector) -> Result<DensityMatrix> {
    use num_complex::Complex64 as C;
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            C::new((1.0 + z) / 2.0, 0.0),
            C::new(x / 2.0, -y / 2.0),
            C::new(x / 2.0, y / 2.0),
            C::new((1.0 - z) / 2.0, 0.0),
        ],
    );
    DensityMatrix::new(m)
}
