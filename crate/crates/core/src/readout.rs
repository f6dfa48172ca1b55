//! Photon-count readout of the electron population.
//!
//! Each of the eight levels `m = 4e + 2c + n` fluoresces at its own rate
//! `N_m`. A single count cannot separate `P₀` from the nuclear populations,
//! so four experiments are run: no pulse, a carbon π pulse (`m ↔ m ⊕ 2`),
//! a nitrogen π pulse (`m ↔ m ⊕ 1`) and both. Averaging the four counts gives
//!
//! ```text
//! F̄ = P₀ · mean(N₀..N₃) + P₁ · mean(N₄..N₇)
//! ```
//!
//! from which `P₀` follows once the bright and dark means are known.

use std::path::Path;

use rand_distr::{Distribution, Poisson};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;
use crate::rng;

pub const NUM_LEVELS: usize = 8;

const DEFAULT_CONFIG: &str = include_str!("../config/readout_default.toml");
const POPULATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutNoise {
    /// Counts equal their expectation values.
    None,
    /// Each sequence's counts are Poisson distributed.
    Poisson { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LuminescenceConfig {
    pub rates: [f64; NUM_LEVELS],
    pub shots: u64,
    pub noise: ReadoutNoise,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    rates: Vec<f64>,
    shots: u64,
    noise: String,
    seed: Option<u64>,
}

impl Default for LuminescenceConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled readout config is valid")
    }
}

impl LuminescenceConfig {
    pub fn new(rates: [f64; NUM_LEVELS], shots: u64, noise: ReadoutNoise) -> Result<Self> {
        let cfg = Self {
            rates,
            shots,
            noise,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::parse("readout config", e.to_string()))?;
        let rates: [f64; NUM_LEVELS] = file.rates.as_slice().try_into().map_err(|_| {
            Error::parse(
                "readout config",
                format!("expected {NUM_LEVELS} rates, found {}", file.rates.len()),
            )
        })?;
        let noise = match file.noise.as_str() {
            "none" => ReadoutNoise::None,
            "poisson" => ReadoutNoise::Poisson {
                seed: file.seed.unwrap_or(rng::DEFAULT_SEED),
            },
            other => {
                return Err(Error::parse(
                    "readout config",
                    format!("unknown noise mode {other:?}"),
                ))
            }
        };
        Self::new(rates, file.shots, noise)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        let rates: Vec<String> = self.rates.iter().map(|r| r.to_string()).collect();
        let (noise, seed) = match self.noise {
            ReadoutNoise::None => ("none", None),
            ReadoutNoise::Poisson { seed } => ("poisson", Some(seed)),
        };
        let mut out = format!(
            "rates = [{}]\nshots = {}\nnoise = \"{}\"\n",
            rates.join(", "),
            self.shots,
            noise
        );
        if let Some(seed) = seed {
            out.push_str(&format!("seed = {seed}\n"));
        }
        out
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_noise(mut self, noise: ReadoutNoise) -> Self {
        self.noise = noise;
        self
    }

    pub fn bright_mean(&self) -> f64 {
        self.rates[..4].iter().sum::<f64>() / 4.0
    }

    pub fn dark_mean(&self) -> f64 {
        self.rates[4..].iter().sum::<f64>() / 4.0
    }

    fn validate(&self) -> Result<()> {
        if let Some(r) = self.rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid luminescence rate {r}"
            )));
        }
        if self.shots == 0 {
            return Err(Error::InvalidInput("shots must be at least 1".into()));
        }
        if self.bright_mean() <= self.dark_mean() {
            return Err(Error::NoContrast {
                bright: self.bright_mean(),
                dark: self.dark_mean(),
            });
        }
        Ok(())
    }
}

/// π-pulse pattern applied before optical readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseSequence {
    Identity,
    /// π pulse on the carbon spin.
    PiRf1,
    /// π pulse on the nitrogen spin.
    PiRf2,
    PiRf1PiRf2,
}

impl PulseSequence {
    pub const ALL: [PulseSequence; 4] = [
        PulseSequence::Identity,
        PulseSequence::PiRf1,
        PulseSequence::PiRf2,
        PulseSequence::PiRf1PiRf2,
    ];

    fn flip_mask(self) -> usize {
        match self {
            PulseSequence::Identity => 0,
            PulseSequence::PiRf1 => 0b010,
            PulseSequence::PiRf2 => 0b001,
            PulseSequence::PiRf1PiRf2 => 0b011,
        }
    }
}

/// Populations after the sequence's π pulses (a permutation of levels).
pub fn apply_sequence(populations: &[f64], sequence: PulseSequence) -> Result<[f64; NUM_LEVELS]> {
    let pops: [f64; NUM_LEVELS] = populations
        .try_into()
        .map_err(|_| Error::DimensionMismatch {
            expected: NUM_LEVELS,
            found: populations.len(),
        })?;
    if pops.iter().any(|p| !p.is_finite() || *p < -POPULATION_TOL) {
        return Err(Error::InvalidInput(
            "populations must be nonnegative".into(),
        ));
    }
    let total: f64 = pops.iter().sum();
    if (total - 1.0).abs() > POPULATION_TOL {
        return Err(Error::InvalidInput(format!("populations sum to {total}")));
    }
    let mask = sequence.flip_mask();
    Ok(std::array::from_fn(|m| pops[m ^ mask]))
}

/// Mean detected photons per shot for the four sequences, in
/// [`PulseSequence::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCounts {
    pub f: [f64; 4],
}

impl PhotonCounts {
    pub fn mean(&self) -> f64 {
        self.f.iter().sum::<f64>() / 4.0
    }
}

pub fn simulate_counts(dm: &DensityMatrix, cfg: &LuminescenceConfig) -> Result<PhotonCounts> {
    if dm.num_qubits() != 3 {
        return Err(Error::InvalidInput(format!(
            "photon readout models 3 qubits, got {}",
            dm.num_qubits()
        )));
    }
    let pops = dm.populations();
    let mut f = [0.0; 4];
    for (j, seq) in PulseSequence::ALL.into_iter().enumerate() {
        let permuted = apply_sequence(&pops, seq)?;
        let expected: f64 = permuted.iter().zip(&cfg.rates).map(|(p, n)| p * n).sum();
        f[j] = match cfg.noise {
            ReadoutNoise::None => expected,
            ReadoutNoise::Poisson { seed } => {
                // The sum of `shots` i.i.d. Poisson(λ) draws is Poisson(shots·λ).
                let total_rate = expected.max(0.0) * cfg.shots as f64;
                let total = if total_rate > 0.0 {
                    Poisson::new(total_rate)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?
                        .sample(&mut rng::rng(rng::item_seed(seed, j as u64)))
                } else {
                    0.0
                };
                total / cfg.shots as f64
            }
        };
    }
    Ok(PhotonCounts { f })
}

/// Bright and dark mean rates used to turn an averaged count into `P₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub bright: f64,
    pub dark: f64,
}

impl Calibration {
    pub fn new(bright: f64, dark: f64) -> Result<Self> {
        if !(bright - dark > 0.0) {
            return Err(Error::NoContrast { bright, dark });
        }
        Ok(Self { bright, dark })
    }

    /// Uses the configured rates directly.
    pub fn from_config(cfg: &LuminescenceConfig) -> Result<Self> {
        Self::new(cfg.bright_mean(), cfg.dark_mean())
    }
}

/// Measures averaged counts on a bright (`P₀ = 1`) and a dark (`P₀ = 0`)
/// reference state.
pub fn calibrate(
    bright_ref: &DensityMatrix,
    dark_ref: &DensityMatrix,
    cfg: &LuminescenceConfig,
) -> Result<Calibration> {
    let reseed = |stream: &str| match cfg.noise {
        ReadoutNoise::None => cfg.clone(),
        ReadoutNoise::Poisson { seed } => cfg.clone().with_noise(ReadoutNoise::Poisson {
            seed: rng::sub_seed(seed, stream),
        }),
    };
    let bright = simulate_counts(bright_ref, &reseed("bright"))?.mean();
    let dark = simulate_counts(dark_ref, &reseed("dark"))?.mean();
    Calibration::new(bright, dark)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P0Estimate {
    /// Clamped to `[0, 1]`.
    pub p0: f64,
    /// Before clamping.
    pub raw: f64,
}

pub fn extract_p0(counts: &PhotonCounts, cal: &Calibration) -> Result<P0Estimate> {
    let contrast = cal.bright - cal.dark;
    if !(contrast > 0.0) {
        return Err(Error::NoContrast {
            bright: cal.bright,
            dark: cal.dark,
        });
    }
    let raw = (counts.mean() - cal.dark) / contrast;
    Ok(P0Estimate {
        p0: raw.clamp(0.0, 1.0),
        raw,
    })
}
