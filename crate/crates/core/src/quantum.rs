//! GHZ states behind Bell multiports: outcome probabilities and the
//! Bell-number correlation function.
//!
//! Each of `M` parties owns an `N`-port Bell multiport with a phase shifter
//! in front of every input. The shared state is the `N`-component GHZ state,
//! and a click behind output `k` is assigned the Bell number
//! `gamma_N^(k-1)`, `gamma_N = exp(2 pi i / N)`.
//!
//! Detector indices are 1-based on every public surface.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{root_of_unity_complex, AngleError, ComplexValue, Turn};

/// Brute-force operations refuse to enumerate more than this many outcomes.
pub const DEFAULT_OUTCOME_CAP: u64 = 10_000_000;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("party count must be at least 1")]
    ZeroParties,
    #[error("expected {expected} local settings, got {found}")]
    SettingCount { expected: usize, found: usize },
    #[error("setting of party {party} has {found} phases, expected {expected}")]
    SettingLength {
        party: usize,
        expected: usize,
        found: usize,
    },
    #[error("outcome has {found} detector indices, expected {expected}")]
    OutcomeLength { expected: usize, found: usize },
    #[error("detector index {index} of party {party} is outside 1..={dim}")]
    DetectorOutOfRange {
        party: usize,
        index: usize,
        dim: usize,
    },
    #[error("state is {state_dim}x{state_parties}, config is {config_dim}x{config_parties}")]
    StateMismatch {
        state_dim: usize,
        state_parties: usize,
        config_dim: usize,
        config_parties: usize,
    },
    #[error("{outcomes} outcomes exceed the enumeration cap of {cap}")]
    CapExceeded { outcomes: u128, cap: u64 },
    #[error("configuration has no perfect correlation")]
    NoPerfectCorrelation,
    #[error(transparent)]
    Angle(#[from] AngleError),
}

/// Phase shifter settings `phi^1 .. phi^N` in front of one party's multiport.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalSetting(pub Vec<Turn>);

impl LocalSetting {
    pub fn zeros(dim: usize) -> Self {
        LocalSetting(vec![Turn::ZERO; dim])
    }

    pub fn phases(&self) -> &[Turn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds the same phase to every port.
    pub fn offset(&self, by: Turn) -> Result<Self, AngleError> {
        self.0
            .iter()
            .map(|p| p.add(by))
            .collect::<Result<_, _>>()
            .map(LocalSetting)
    }
}

/// A full experiment: `parties` multiports with `dim` ports each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub parties: usize,
    pub settings: Vec<LocalSetting>,
}

impl ExperimentConfig {
    pub fn new(dim: usize, settings: Vec<LocalSetting>) -> Result<Self, QuantumError> {
        let config = ExperimentConfig {
            dim,
            parties: settings.len(),
            settings,
        };
        config.validate()?;
        Ok(config)
    }

    /// All phases zero.
    pub fn zero_phases(dim: usize, parties: usize) -> Result<Self, QuantumError> {
        Self::new(dim, vec![LocalSetting::zeros(dim); parties])
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        if self.dim == 0 {
            return Err(QuantumError::ZeroDimension);
        }
        if self.parties == 0 {
            return Err(QuantumError::ZeroParties);
        }
        if self.settings.len() != self.parties {
            return Err(QuantumError::SettingCount {
                expected: self.parties,
                found: self.settings.len(),
            });
        }
        for (party, s) in self.settings.iter().enumerate() {
            if s.len() != self.dim {
                return Err(QuantumError::SettingLength {
                    party: party + 1,
                    expected: self.dim,
                    found: s.len(),
                });
            }
        }
        Ok(())
    }

    /// Number of joint outcomes `N^M`, saturating in `u128`.
    pub fn outcome_count(&self) -> u128 {
        (self.dim as u128).saturating_pow(self.parties as u32)
    }

    /// `sum_l phi_l^m` for the 0-based port `m`, reduced to a fraction of a
    /// turn in floating point.
    fn port_phase_fraction(&self, m: usize) -> f64 {
        self.settings
            .iter()
            .fold(0.0, |acc, s| (acc + s.0[m].as_fraction()).fract())
    }

    /// The per-port amplitudes `exp(i sum_l phi_l^m)`.
    fn port_phases(&self) -> Vec<Complex64> {
        (0..self.dim)
            .map(|m| {
                let (s, c) = (std::f64::consts::TAU * self.port_phase_fraction(m)).sin_cos();
                Complex64::new(c, s)
            })
            .collect()
    }

    fn check_cap(&self, cap: u64) -> Result<u64, QuantumError> {
        let outcomes = self.outcome_count();
        if outcomes > cap as u128 {
            return Err(QuantumError::CapExceeded { outcomes, cap });
        }
        Ok(outcomes as u64)
    }
}

/// Detector indices `k_1 .. k_M`, each in `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub Vec<usize>);

impl Outcome {
    fn validate(&self, config: &ExperimentConfig) -> Result<(), QuantumError> {
        if self.0.len() != config.parties {
            return Err(QuantumError::OutcomeLength {
                expected: config.parties,
                found: self.0.len(),
            });
        }
        for (party, &k) in self.0.iter().enumerate() {
            if k == 0 || k > config.dim {
                return Err(QuantumError::DetectorOutOfRange {
                    party: party + 1,
                    index: k,
                    dim: config.dim,
                });
            }
        }
        Ok(())
    }

    /// `sum_l (k_l - 1) mod N`: the exponent of the product of Bell numbers.
    pub fn bell_exponent(&self, dim: usize) -> u64 {
        (self.0.iter().map(|&k| (k - 1) % dim).sum::<usize>() % dim) as u64
    }

    /// The outcome with lexicographic rank `index` among all `N^M` outcomes.
    fn from_index(mut index: u64, dim: usize, parties: usize) -> Outcome {
        let mut ks = vec![0; parties];
        for k in ks.iter_mut().rev() {
            *k = (index % dim as u64) as usize + 1;
            index /= dim as u64;
        }
        Outcome(ks)
    }
}

/// The Bell number `gamma_order^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellValue {
    pub exponent: u64,
    pub order: u64,
}

impl BellValue {
    pub fn new(exponent: i64, order: u64) -> Self {
        BellValue {
            exponent: exponent.rem_euclid(order as i64) as u64,
            order,
        }
    }

    pub fn one(order: u64) -> Self {
        BellValue { exponent: 0, order }
    }

    pub fn to_complex(self) -> ComplexValue {
        root_of_unity_complex(self.exponent as i64, self.order)
    }
}

/// A dense `N x N` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let n = self.dim;
        let mut entries = vec![Complex64::default(); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.get(r, c).conj();
            }
        }
        UnitaryMatrix { dim: n, entries }
    }

    pub fn matmul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        let n = self.dim;
        let mut entries = vec![Complex64::default(); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = (0..n).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        UnitaryMatrix { dim: n, entries }
    }
}

/// The Bell multiport: `U[m][m'] = gamma_n^((m-1)(m'-1)) / sqrt(n)`.
pub fn bell_multiport(n: usize) -> Result<UnitaryMatrix, QuantumError> {
    if n == 0 {
        return Err(QuantumError::ZeroDimension);
    }
    let scale = 1.0 / (n as f64).sqrt();
    let entries = (0..n * n)
        .map(|i| {
            let (m, mp) = (i / n, i % n);
            // reduce the exponent mod n before converting
            root_of_unity_complex(((m * mp) % n) as i64, n as u64) * scale
        })
        .collect();
    Ok(UnitaryMatrix { dim: n, entries })
}

/// A GHZ-type state. Only the `N` diagonal kets `|j, j, ..., j>` ever carry
/// amplitude, so only those are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub dim: usize,
    pub parties: usize,
    diagonal: Vec<Complex64>,
}

impl StateVector {
    /// Amplitude of the ket `|k_1, ..., k_M>` (1-based); zero off the diagonal.
    pub fn amplitude(&self, ket: &[usize]) -> Complex64 {
        match ket.first() {
            Some(&j) if ket.len() == self.parties && j >= 1 && j <= self.dim => {
                if ket.iter().all(|&k| k == j) {
                    self.diagonal[j - 1]
                } else {
                    Complex64::default()
                }
            }
            _ => Complex64::default(),
        }
    }

    /// Amplitudes on `|1,..,1>, |2,..,2>, ...`.
    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn norm_sqr(&self) -> f64 {
        self.diagonal.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `(1/sqrt n) sum_j |j>^{(x) m}`.
pub fn ghz_state(n: usize, m: usize) -> Result<StateVector, QuantumError> {
    if n == 0 {
        return Err(QuantumError::ZeroDimension);
    }
    if m == 0 {
        return Err(QuantumError::ZeroParties);
    }
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    Ok(StateVector {
        dim: n,
        parties: m,
        diagonal: vec![amp; n],
    })
}

/// Passes the state through the phase shifters of `config`: the amplitude of
/// `|j,...,j>` picks up `exp(i sum_l phi_l^j)`.
pub fn apply_phases(
    state: &StateVector,
    config: &ExperimentConfig,
) -> Result<StateVector, QuantumError> {
    config.validate()?;
    if state.dim != config.dim || state.parties != config.parties {
        return Err(QuantumError::StateMismatch {
            state_dim: state.dim,
            state_parties: state.parties,
            config_dim: config.dim,
            config_parties: config.parties,
        });
    }
    let diagonal = state
        .diagonal
        .iter()
        .zip(config.port_phases())
        .map(|(a, p)| a * p)
        .collect();
    Ok(StateVector {
        diagonal,
        ..state.clone()
    })
}

/// Evaluates outcome probabilities for one configuration, sharing the
/// per-port phase factors and the table of Bell numbers between calls.
struct ProbabilityKernel {
    dim: usize,
    parties: usize,
    port_phases: Vec<Complex64>,
    roots: Vec<Complex64>,
    norm: f64,
}

impl ProbabilityKernel {
    fn new(config: &ExperimentConfig) -> Self {
        let dim = config.dim;
        ProbabilityKernel {
            dim,
            parties: config.parties,
            port_phases: config.port_phases(),
            roots: (0..dim)
                .map(|e| root_of_unity_complex(e as i64, dim as u64))
                .collect(),
            norm: (dim as f64).powi(-(config.parties as i32 + 1)),
        }
    }

    /// `(1/N)^(M+1) |sum_m exp(i sum_l phi_l^m) prod_n gamma^((m-1)(k_n-1))|^2`
    fn probability(&self, ks: &[usize]) -> f64 {
        let n = self.dim;
        let amplitude: Complex64 = self
            .port_phases
            .iter()
            .enumerate()
            .map(|(m, phase)| {
                let e = ks.iter().fold(0, |acc, &k| (acc + m * (k - 1)) % n);
                phase * self.roots[e]
            })
            .sum();
        self.norm * amplitude.norm_sqr()
    }

    fn outcome(&self, index: u64) -> Outcome {
        Outcome::from_index(index, self.dim, self.parties)
    }
}

/// Joint probability that party `l` registers its photon behind output `k_l`.
pub fn joint_probability(
    config: &ExperimentConfig,
    outcome: &Outcome,
) -> Result<f64, QuantumError> {
    config.validate()?;
    outcome.validate(config)?;
    Ok(ProbabilityKernel::new(config).probability(&outcome.0))
}

/// All `N^M` outcomes with their probabilities, in lexicographic order of
/// `(k_1, ..., k_M)`.
pub fn outcome_distribution(
    config: &ExperimentConfig,
    cap: u64,
) -> Result<Vec<(Outcome, f64)>, QuantumError> {
    config.validate()?;
    let total = config.check_cap(cap)?;
    let kernel = ProbabilityKernel::new(config);
    Ok((0..total)
        .into_par_iter()
        .map(|i| {
            let o = kernel.outcome(i);
            let p = kernel.probability(&o.0);
            (o, p)
        })
        .collect())
}

/// The correlation function by brute force: the average over all outcomes of
/// the product of Bell numbers, weighted by the joint probability.
pub fn correlation_direct(
    config: &ExperimentConfig,
    cap: u64,
) -> Result<ComplexValue, QuantumError> {
    config.validate()?;
    let total = config.check_cap(cap)?;
    let kernel = ProbabilityKernel::new(config);
    // fixed chunks summed in order keep the result independent of scheduling
    let partials: Vec<Complex64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .map(|i| {
                    let o = kernel.outcome(i);
                    kernel.roots[o.bell_exponent(kernel.dim) as usize] * kernel.probability(&o.0)
                })
                .sum()
        })
        .collect();
    Ok(partials.into_iter().sum())
}

/// `sum_l (phi_l^m - phi_l^(m+1))` as a float fraction of a turn, with the
/// port index taken cyclically.
fn cyclic_difference_fraction(config: &ExperimentConfig, m: usize) -> f64 {
    let next = (m + 1) % config.dim;
    config.settings.iter().fold(0.0, |acc, s| {
        (acc + s.0[m].as_fraction() - s.0[next].as_fraction()).fract()
    })
}

/// The correlation function in closed form,
/// `E = (1/N) sum_m exp(i sum_l (phi_l^m - phi_l^(m+1)))` with
/// `phi^(N+1) = phi^1`. Needs no enumeration.
pub fn correlation_closed(config: &ExperimentConfig) -> Result<ComplexValue, QuantumError> {
    config.validate()?;
    let sum: Complex64 = (0..config.dim)
        .map(|m| {
            let (s, c) = (std::f64::consts::TAU * cyclic_difference_fraction(config, m)).sin_cos();
            Complex64::new(c, s)
        })
        .sum();
    Ok(sum / config.dim as f64)
}

/// The exact cyclic phase sums `sum_l phi_l^(m,m+1)` for every port `m`.
pub fn cyclic_phase_sums(config: &ExperimentConfig) -> Result<Vec<Turn>, QuantumError> {
    config.validate()?;
    let n = config.dim;
    (0..n)
        .map(|m| {
            let terms = config
                .settings
                .iter()
                .map(|s| s.0[m].sub(s.0[(m + 1) % n]))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Turn::sum(terms)?)
        })
        .collect()
}

/// Returns `gamma_N^e` when every cyclic term of the closed form equals the
/// same `gamma_N^e`, i.e. when the correlation is perfect. Decided exactly.
pub fn perfect_correlation_value(
    config: &ExperimentConfig,
) -> Result<Option<BellValue>, QuantumError> {
    let sums = cyclic_phase_sums(config)?;
    let first = sums[0];
    if sums.iter().any(|&t| t != first) {
        return Ok(None);
    }
    let order = config.dim as u64;
    Ok(first
        .root_exponent(order)
        .map(|e| BellValue { exponent: e, order }))
}

/// Given the detectors that fired for parties `1..M-1`, the detector that
/// must fire for party `M` under a perfect correlation `gamma_N^e`: the
/// unique `k_M` with `sum_l (k_l - 1) = e (mod N)`.
pub fn predict_remote_outcome(
    config: &ExperimentConfig,
    partial: &[usize],
) -> Result<usize, QuantumError> {
    config.validate()?;
    if partial.len() + 1 != config.parties {
        return Err(QuantumError::OutcomeLength {
            expected: config.parties - 1,
            found: partial.len(),
        });
    }
    for (party, &k) in partial.iter().enumerate() {
        if k == 0 || k > config.dim {
            return Err(QuantumError::DetectorOutOfRange {
                party: party + 1,
                index: k,
                dim: config.dim,
            });
        }
    }
    let value = perfect_correlation_value(config)?.ok_or(QuantumError::NoPerfectCorrelation)?;
    let n = config.dim as u64;
    let seen = partial.iter().map(|&k| (k - 1) as u64).sum::<u64>() % n;
    Ok(((value.exponent + n - seen) % n) as usize + 1)
}
