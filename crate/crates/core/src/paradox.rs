//! GHZ paradoxes for `N` parties with `N`-port multiports.
//!
//! Every party owns two settings: `phi = (0, pi/d, 2pi/d, ..., (N-1)pi/d)`
//! with `d = N` for odd `N` and `d = N - 1` for even `N`, and
//! `phi' = (0, ..., 0)`. Runs with exactly one party at `phi'` are
//! perfectly correlated, as is the all-`phi'` run. Local realism then
//! forces the all-`phi` run to be perfectly correlated with value 1, which
//! the quantum prediction contradicts.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{AngleError, ComplexValue, Turn};
use crate::lhv::{LhvError, LhvProblem, ProductConstraint};
use crate::quantum::{
    correlation_closed, perfect_correlation_value, BellValue, ExperimentConfig, LocalSetting,
    QuantumError,
};

pub const PHI: &str = "phi";
pub const PHI_PRIME: &str = "phi_prime";

/// Largest `n` a scan will certify.
pub const MAX_SCAN_N: usize = 25;

/// Agreement required between the closed probe formula and the generic
/// correlation function.
const CROSS_CHECK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParadoxError {
    #[error("GHZ paradoxes need at least three observers (got n = {0}); two observers admit none with this construction")]
    TooFewParties(usize),
    #[error("scan range {0}..={1} is invalid: need 3 <= n_min <= n_max <= {2}")]
    ScanRange(usize, usize, usize),
    #[error("run {run} should be perfectly correlated with {expected:?}, found {found:?}")]
    ConstraintValue {
        run: usize,
        expected: BellValue,
        found: Option<BellValue>,
    },
    #[error("closed probe formula {formula} disagrees with the correlation function {computed}")]
    ProbeMismatch {
        formula: ComplexValue,
        computed: ComplexValue,
    },
    #[error("local hidden variables do not force a single probe value: {0:?}")]
    NotForced(Vec<u64>),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Lhv(#[from] LhvError),
    #[error(transparent)]
    Angle(#[from] AngleError),
}

/// The two local settings every party chooses between.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingPair {
    pub phi: LocalSetting,
    pub phi_prime: LocalSetting,
}

fn check_n(n: usize) -> Result<(), ParadoxError> {
    if n < 3 {
        Err(ParadoxError::TooFewParties(n))
    } else {
        Ok(())
    }
}

/// Entry `j` of `phi` is `j/(2n)` of a turn for odd `n` and `j/(2(n-1))` for
/// even `n`.
pub fn ghz_settings(n: usize) -> Result<SettingPair, ParadoxError> {
    check_n(n)?;
    let d = if n % 2 == 1 { n } else { n - 1 };
    let phi = (0..n)
        .map(|j| Turn::from_fraction(j as i64, 2 * d as i64))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SettingPair {
        phi: LocalSetting(phi),
        phi_prime: LocalSetting::zeros(n),
    })
}

/// The `n` runs with party `l` (the `l`-th entry) at `phi'` and everyone
/// else at `phi`, followed by the all-`phi'` baseline run.
pub fn constraint_configs(n: usize) -> Result<Vec<ExperimentConfig>, ParadoxError> {
    let pair = ghz_settings(n)?;
    let mut runs = (0..n)
        .map(|l| {
            let settings = (0..n)
                .map(|k| if k == l { &pair.phi_prime } else { &pair.phi }.clone())
                .collect();
            ExperimentConfig::new(n, settings)
        })
        .collect::<Result<Vec<_>, _>>()?;
    runs.push(ExperimentConfig::new(n, vec![pair.phi_prime.clone(); n])?);
    Ok(runs)
}

/// All parties at `phi`.
pub fn probe_config(n: usize) -> Result<ExperimentConfig, ParadoxError> {
    let pair = ghz_settings(n)?;
    Ok(ExperimentConfig::new(n, vec![pair.phi; n])?)
}

/// The perfect correlation of every single-`phi'` run: `gamma_n^(-m)` for
/// `n = 2m + 1`, and `-1 = gamma_n^m` for `n = 2m`.
pub fn expected_constraint_value(n: usize) -> Result<BellValue, ParadoxError> {
    check_n(n)?;
    let m = (n / 2) as i64;
    let exponent = if n % 2 == 1 { -m } else { m };
    Ok(BellValue::new(exponent, n as u64))
}

/// `(1/(2m+1)) [2m exp(-i 2m pi/(2m+1)) + exp(i 4m^2 pi/(2m+1))]`, the
/// single-`phi'` correlation for odd `n = 2m + 1` written out term by term.
pub fn odd_constraint_formula(n: usize) -> Result<ComplexValue, ParadoxError> {
    check_n(n)?;
    let (m, nf) = ((n / 2) as f64, n as f64);
    let sum = Complex64::from_polar(2.0 * m, -2.0 * m * PI / nf)
        + Complex64::from_polar(1.0, 4.0 * m * m * PI / nf);
    Ok(sum / nf)
}

/// Quantum correlation of the all-`phi` run from its closed expressions:
/// `-(n-2)/n` for odd `n`, `(1/2m)[(2m-1) exp(-i 2m pi/(2m-1)) + 1]` for
/// even `n = 2m`.
pub fn quantum_probe_value(n: usize) -> Result<ComplexValue, ParadoxError> {
    check_n(n)?;
    let nf = n as f64;
    if n % 2 == 1 {
        return Ok(Complex64::new(-(nf - 2.0) / nf, 0.0));
    }
    let two_m = nf;
    let v = Complex64::from_polar(two_m - 1.0, -two_m * PI / (two_m - 1.0)) + 1.0;
    Ok(v / two_m)
}

/// Self-contained record of one paradox.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxCertificate {
    pub dim: usize,
    pub settings: SettingPair,
    /// Single-`phi'` runs, then the all-`phi'` baseline.
    pub constraint_configs: Vec<ExperimentConfig>,
    pub constraint_value: BellValue,
    pub baseline_value: BellValue,
    pub probe_config: ExperimentConfig,
    pub lhv_forced_value: BellValue,
    /// Number of deterministic strategies meeting every constraint.
    pub lhv_strategy_count: BigUint,
    /// Whether brute-force enumeration confirmed the solver.
    pub lhv_enumerated: bool,
    pub quantum_probe_value: ComplexValue,
    pub discrepancy: f64,
}

/// The label form of `config`: which parties sit at `phi'`.
fn labels_of(config: &ExperimentConfig, pair: &SettingPair) -> Vec<String> {
    config
        .settings
        .iter()
        .map(|s| if *s == pair.phi { PHI } else { PHI_PRIME }.to_string())
        .collect()
}

/// Runs the whole argument for `n`: quantum constraint values, the LHV
/// consequence at the all-`phi` probe, and the quantum probe value.
/// Strategy enumeration cross-checks the solver when the strategy space is
/// at most `enumeration_cap`.
pub fn build_certificate(
    n: usize,
    enumeration_cap: u64,
) -> Result<ParadoxCertificate, ParadoxError> {
    let pair = ghz_settings(n)?;
    let configs = constraint_configs(n)?;
    let expected = expected_constraint_value(n)?;
    let order = n as u64;

    let mut constraints = Vec::with_capacity(configs.len());
    for (run, config) in configs.iter().enumerate() {
        let want = if run < n {
            expected
        } else {
            BellValue::one(order)
        };
        let found = perfect_correlation_value(config)?;
        if found != Some(want) {
            return Err(ParadoxError::ConstraintValue {
                run: run + 1,
                expected: want,
                found,
            });
        }
        constraints.push(ProductConstraint {
            choice: labels_of(config, &pair),
            exponent: want.exponent,
        });
    }

    let problem = LhvProblem {
        dim: order,
        parties: n,
        menu: vec![PHI.to_string(), PHI_PRIME.to_string()],
        constraints,
    };
    let probe = probe_config(n)?;
    let analysis = problem.analyze(&labels_of(&probe, &pair), enumeration_cap)?;
    let forced = match analysis.achievable.iter().collect::<Vec<_>>()[..] {
        [&e] => BellValue { exponent: e, order },
        _ => {
            return Err(ParadoxError::NotForced(
                analysis.achievable.into_iter().collect(),
            ))
        }
    };

    let computed = correlation_closed(&probe)?;
    let formula = quantum_probe_value(n)?;
    if (computed - formula).norm() > CROSS_CHECK_TOLERANCE {
        return Err(ParadoxError::ProbeMismatch { formula, computed });
    }

    Ok(ParadoxCertificate {
        dim: n,
        settings: pair,
        constraint_value: expected,
        baseline_value: BellValue::one(order),
        constraint_configs: configs,
        probe_config: probe,
        lhv_forced_value: forced,
        lhv_strategy_count: analysis.solution.count,
        lhv_enumerated: analysis.enumeration.is_some(),
        quantum_probe_value: computed,
        discrepancy: (forced.to_complex() - computed).norm(),
    })
}

impl ParadoxCertificate {
    /// Re-derives every quantum value from the embedded configurations.
    pub fn reverify(&self) -> Result<bool, ParadoxError> {
        let n = self.dim;
        let runs_ok = self.constraint_configs.len() == n + 1
            && self.constraint_configs.iter().enumerate().all(|(i, c)| {
                let want = if i < n {
                    self.constraint_value
                } else {
                    self.baseline_value
                };
                matches!(perfect_correlation_value(c), Ok(Some(v)) if v == want)
            });
        let computed = correlation_closed(&self.probe_config)?;
        let discrepancy = (self.lhv_forced_value.to_complex() - computed).norm();
        Ok(runs_ok
            && (computed - self.quantum_probe_value).norm() <= CROSS_CHECK_TOLERANCE
            && (discrepancy - self.discrepancy).abs() <= CROSS_CHECK_TOLERANCE
            && self.discrepancy > 0.0)
    }

    pub fn summary(&self) -> ScanRow {
        ScanRow {
            n: self.dim,
            parity: if self.dim % 2 == 1 {
                Parity::Odd
            } else {
                Parity::Even
            },
            constraint_value: self.constraint_value,
            lhv_forced_value: self.lhv_forced_value,
            quantum_probe_value: self.quantum_probe_value,
            discrepancy: self.discrepancy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

/// One row of a scan over `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub parity: Parity,
    pub constraint_value: BellValue,
    pub lhv_forced_value: BellValue,
    pub quantum_probe_value: ComplexValue,
    pub discrepancy: f64,
}

/// Certificates for every `n` in `n_min..=n_max`, in order.
pub fn scan(
    n_min: usize,
    n_max: usize,
    enumeration_cap: u64,
) -> Result<Vec<ScanRow>, ParadoxError> {
    if n_min < 3 || n_min > n_max || n_max > MAX_SCAN_N {
        return Err(ParadoxError::ScanRange(n_min, n_max, MAX_SCAN_N));
    }
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| build_certificate(n, enumeration_cap).map(|c| c.summary()))
        .collect()
}
