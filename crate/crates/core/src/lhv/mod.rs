//! Deterministic local-hidden-variable strategies.
//!
//! A strategy fixes, for every party and every setting label on the menu,
//! which detector fires, written as an exponent `a` in `Z_N` of the Bell
//! number `gamma_N^a`. Products of Bell numbers become sums of exponents, so
//! every perfect-correlation requirement is one linear congruence and the
//! set of strategies compatible with a list of requirements is the solution
//! set of a linear system over `Z_N`.
//!
//! Everything here works with abstract labels; no phases are involved.

mod congruence;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::ComplexValue;
use crate::quantum::BellValue;

pub use congruence::{CongruenceSystem, Consistency, SolutionSet};

/// Brute-force strategy enumeration refuses spaces larger than this.
pub const DEFAULT_STRATEGY_CAP: u64 = 100_000_000;

const WEIGHT_TOLERANCE: f64 = 1e-12;
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LhvError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("malformed congruence system: {0}")]
    Shape(String),
    #[error("dimension must be at least 2")]
    Dimension,
    #[error("setting menu is empty")]
    EmptyMenu,
    #[error("setting menu repeats label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown setting label {0:?}")]
    UnknownLabel(String),
    #[error("choice names {found} labels, expected one per party ({expected})")]
    ChoiceLength { expected: usize, found: usize },
    #[error("required exponent {exponent} is not below the dimension {dim}")]
    ExponentRange { exponent: u64, dim: u64 },
    #[error(
        "strategy space of {size} exceeds the enumeration cap of {cap}; use the congruence solver"
    )]
    CapExceeded { size: u128, cap: u64 },
    #[error("mixture weights must be non-negative and sum to 1 (sum is {0})")]
    Weights(f64),
    #[error("mixture is empty")]
    EmptyMixture,
    #[error("strategy does not match the problem shape")]
    StrategyShape,
    #[error("solver and enumeration disagree: {0}")]
    PathDisagreement(String),
}

/// `prod_l I_l(choice_l, lambda) = gamma_N^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductConstraint {
    pub choice: Vec<String>,
    pub exponent: u64,
}

/// A hidden-variable problem: parties share one setting menu and must meet
/// every product constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvProblem {
    pub dim: u64,
    pub parties: usize,
    pub menu: Vec<String>,
    pub constraints: Vec<ProductConstraint>,
}

/// One deterministic strategy: `exponents[party][label]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LhvStrategy {
    pub dim: u64,
    pub menu: Vec<String>,
    pub exponents: Vec<Vec<u64>>,
}

impl LhvStrategy {
    fn label_index(&self, label: &str) -> Result<usize, LhvError> {
        self.menu
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LhvError::UnknownLabel(label.to_string()))
    }

    /// Exponent of the product of all parties' assigned Bell numbers.
    pub fn value(&self, choice: &[String]) -> Result<BellValue, LhvError> {
        if choice.len() != self.exponents.len() {
            return Err(LhvError::ChoiceLength {
                expected: self.exponents.len(),
                found: choice.len(),
            });
        }
        let mut sum = 0;
        for (party, label) in choice.iter().enumerate() {
            sum = (sum + self.exponents[party][self.label_index(label)?]) % self.dim;
        }
        Ok(BellValue {
            exponent: sum,
            order: self.dim,
        })
    }

    fn flat(&self) -> Vec<u64> {
        self.exponents.iter().flatten().copied().collect()
    }
}

/// Free-function form of [`LhvStrategy::value`].
pub fn strategy_value(strategy: &LhvStrategy, choice: &[String]) -> Result<BellValue, LhvError> {
    strategy.value(choice)
}

impl LhvProblem {
    pub fn validate(&self) -> Result<(), LhvError> {
        if self.dim < 2 {
            return Err(LhvError::Dimension);
        }
        if self.menu.is_empty() {
            return Err(LhvError::EmptyMenu);
        }
        for (i, label) in self.menu.iter().enumerate() {
            if self.menu[..i].contains(label) {
                return Err(LhvError::DuplicateLabel(label.clone()));
            }
        }
        for c in &self.constraints {
            self.choice_columns(&c.choice)?;
            if c.exponent >= self.dim {
                return Err(LhvError::ExponentRange {
                    exponent: c.exponent,
                    dim: self.dim,
                });
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.parties * self.menu.len()
    }

    /// Variable index of each party's chosen label; variables are ordered
    /// party-major, then by menu position.
    fn choice_columns(&self, choice: &[String]) -> Result<Vec<usize>, LhvError> {
        if choice.len() != self.parties {
            return Err(LhvError::ChoiceLength {
                expected: self.parties,
                found: choice.len(),
            });
        }
        choice
            .iter()
            .enumerate()
            .map(|(party, label)| {
                self.menu
                    .iter()
                    .position(|l| l == label)
                    .map(|s| party * self.menu.len() + s)
                    .ok_or_else(|| LhvError::UnknownLabel(label.clone()))
            })
            .collect()
    }

    /// 0/1 coefficient row selecting the variables named by `choice`.
    pub fn choice_row(&self, choice: &[String]) -> Result<Vec<u64>, LhvError> {
        let mut row = vec![0; self.num_vars()];
        for col in self.choice_columns(choice)? {
            row[col] = 1;
        }
        Ok(row)
    }

    /// The additive form of the constraints: one congruence per constraint.
    pub fn to_congruences(&self) -> Result<CongruenceSystem, LhvError> {
        self.validate()?;
        let matrix = self
            .constraints
            .iter()
            .map(|c| self.choice_row(&c.choice))
            .collect::<Result<Vec<_>, _>>()?;
        let rhs = self.constraints.iter().map(|c| c.exponent).collect();
        CongruenceSystem::new(self.dim, self.num_vars(), matrix, rhs)
    }

    pub fn solve(&self) -> Result<SolutionSet, LhvError> {
        self.to_congruences()?.solve()
    }

    /// `N^(parties * |menu|)`, saturating.
    pub fn strategy_space(&self) -> u128 {
        (self.dim as u128).saturating_pow(self.num_vars() as u32)
    }

    pub fn strategy_from_flat(&self, flat: &[u64]) -> LhvStrategy {
        LhvStrategy {
            dim: self.dim,
            menu: self.menu.clone(),
            exponents: flat.chunks(self.menu.len()).map(<[u64]>::to_vec).collect(),
        }
    }

    fn check_strategy(&self, s: &LhvStrategy) -> Result<(), LhvError> {
        let ok = s.dim == self.dim
            && s.menu == self.menu
            && s.exponents.len() == self.parties
            && s.exponents
                .iter()
                .all(|r| r.len() == self.menu.len() && r.iter().all(|&e| e < self.dim));
        if ok {
            Ok(())
        } else {
            Err(LhvError::StrategyShape)
        }
    }

    fn compiled(&self) -> Result<Vec<(Vec<usize>, u64)>, LhvError> {
        self.validate()?;
        self.constraints
            .iter()
            .map(|c| Ok((self.choice_columns(&c.choice)?, c.exponent)))
            .collect()
    }

    fn check_cap(&self, cap: u64) -> Result<u64, LhvError> {
        let size = self.strategy_space();
        if size > cap as u128 {
            return Err(LhvError::CapExceeded { size, cap });
        }
        Ok(size as u64)
    }

    /// Visits every consistent strategy in lexicographic order of the flat
    /// exponent vector, in parallel over fixed chunks of the index space.
    fn scan_consistent<T, F>(&self, cap: u64, per_chunk: F) -> Result<Vec<T>, LhvError>
    where
        T: Send,
        F: Fn(&mut dyn Iterator<Item = Vec<u64>>) -> T + Sync,
    {
        let compiled = self.compiled()?;
        let total = self.check_cap(cap)?;
        let (n, vars) = (self.dim, self.num_vars());
        Ok((0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut digits = vec![0u64; vars];
                let mut idx = start;
                for d in digits.iter_mut().rev() {
                    *d = idx % n;
                    idx /= n;
                }
                let mut iter = (start..end).filter_map(|i| {
                    let hit = compiled
                        .iter()
                        .all(|(cols, e)| cols.iter().map(|&k| digits[k]).sum::<u64>() % n == *e);
                    let out = hit.then(|| digits.clone());
                    if i + 1 < end {
                        increment(&mut digits, n);
                    }
                    out
                });
                per_chunk(&mut iter)
            })
            .collect())
    }

    /// Every strategy satisfying all constraints, lexicographically ordered.
    pub fn enumerate_consistent(&self, cap: u64) -> Result<Vec<LhvStrategy>, LhvError> {
        let chunks = self.scan_consistent(cap, |it| it.collect::<Vec<_>>())?;
        Ok(chunks
            .into_iter()
            .flatten()
            .map(|flat| self.strategy_from_flat(&flat))
            .collect())
    }

    /// Consistent-strategy count and the probe values they produce, by
    /// exhaustive enumeration.
    pub fn enumerate_summary(
        &self,
        probe: &[String],
        cap: u64,
    ) -> Result<EnumerationSummary, LhvError> {
        let cols = self.choice_columns(probe)?;
        let n = self.dim;
        let chunks = self.scan_consistent(cap, |it| {
            let mut count = 0u64;
            let mut values = BTreeSet::new();
            for x in it {
                count += 1;
                values.insert(cols.iter().map(|&k| x[k]).sum::<u64>() % n);
            }
            (count, values)
        })?;
        let mut summary = EnumerationSummary {
            count: 0,
            achievable: BTreeSet::new(),
        };
        for (count, values) in chunks {
            summary.count += count;
            summary.achievable.extend(values);
        }
        Ok(summary)
    }

    /// Solves the constraints algebraically and, when the strategy space is
    /// within `cap`, also by enumeration; the two must agree.
    pub fn analyze(&self, probe: &[String], cap: u64) -> Result<LhvAnalysis, LhvError> {
        let system = self.to_congruences()?;
        let solution = system.solve()?;
        let probe_row = self.choice_row(probe)?;
        let achievable = solution.linear_form_values(&probe_row);
        if let Some(x0) = &solution.particular {
            if !system.is_satisfied_by(x0) {
                return Err(LhvError::PathDisagreement(
                    "particular solution violates the system".into(),
                ));
            }
        }
        let enumeration = if self.strategy_space() <= cap as u128 {
            let summary = self.enumerate_summary(probe, cap)?;
            if BigUint::from(summary.count) != solution.count {
                return Err(LhvError::PathDisagreement(format!(
                    "solver counts {} strategies, enumeration {}",
                    solution.count, summary.count
                )));
            }
            if summary.achievable != achievable {
                return Err(LhvError::PathDisagreement(format!(
                    "solver probe values {:?}, enumeration {:?}",
                    achievable, summary.achievable
                )));
            }
            Some(summary)
        } else {
            None
        };
        Ok(LhvAnalysis {
            system,
            solution,
            probe: probe.to_vec(),
            achievable,
            enumeration,
        })
    }

    /// Particular strategy from the algebraic solution, if any.
    pub fn particular_strategy(&self, solution: &SolutionSet) -> Option<LhvStrategy> {
        solution
            .particular
            .as_deref()
            .map(|x| self.strategy_from_flat(x))
    }

    /// Checks that `strategy` meets every constraint.
    pub fn is_consistent(&self, strategy: &LhvStrategy) -> Result<bool, LhvError> {
        self.check_strategy(strategy)?;
        Ok(self.to_congruences()?.is_satisfied_by(&strategy.flat()))
    }
}

fn increment(digits: &mut [u64], n: u64) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return;
        }
        *d = 0;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub count: u64,
    pub achievable: BTreeSet<u64>,
}

/// Result of [`LhvProblem::analyze`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvAnalysis {
    pub system: CongruenceSystem,
    pub solution: SolutionSet,
    pub probe: Vec<String>,
    /// Exponents local realism can give the probe's product.
    pub achievable: BTreeSet<u64>,
    pub enumeration: Option<EnumerationSummary>,
}

impl LhvAnalysis {
    pub fn achievable_values(&self) -> BTreeSet<BellValue> {
        let order = self.system.modulus;
        self.achievable
            .iter()
            .map(|&exponent| BellValue { exponent, order })
            .collect()
    }
}

/// Values `prod_l I_l(probe_l, lambda)` that strategies meeting every
/// constraint can produce. Empty when the constraints are contradictory.
pub fn achievable_values(
    problem: &LhvProblem,
    probe: &[String],
    cap: u64,
) -> Result<BTreeSet<BellValue>, LhvError> {
    Ok(problem.analyze(probe, cap)?.achievable_values())
}

/// Correlation of a convex mixture of deterministic strategies:
/// `sum_lambda w(lambda) gamma_N^(value(lambda, choice))`.
pub fn mixture_correlation(
    weighted: &[(LhvStrategy, f64)],
    choice: &[String],
) -> Result<ComplexValue, LhvError> {
    if weighted.is_empty() {
        return Err(LhvError::EmptyMixture);
    }
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    if weighted.iter().any(|(_, w)| w.is_nan() || *w < 0.0)
        || (total - 1.0).abs() > WEIGHT_TOLERANCE
    {
        return Err(LhvError::Weights(total));
    }
    weighted
        .iter()
        .try_fold(ComplexValue::default(), |acc, (s, w)| {
            Ok(acc + s.value(choice)?.to_complex() * *w)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn constraint(xs: &[&str], exponent: u64) -> ProductConstraint {
        ProductConstraint {
            choice: labels(xs),
            exponent,
        }
    }

    /// The three-qutrit problem: three single-phi' runs with value alpha^2
    /// and the all-phi' baseline with value 1.
    fn three_qutrits() -> LhvProblem {
        LhvProblem {
            dim: 3,
            parties: 3,
            menu: labels(&["phi", "phi_prime"]),
            constraints: vec![
                constraint(&["phi", "phi", "phi_prime"], 2),
                constraint(&["phi_prime", "phi", "phi"], 2),
                constraint(&["phi", "phi_prime", "phi"], 2),
                constraint(&["phi_prime", "phi_prime", "phi_prime"], 0),
            ],
        }
    }

    fn strategy(dim: u64, exps: &[u64]) -> LhvStrategy {
        LhvStrategy {
            dim,
            menu: labels(&["s"]),
            exponents: exps.iter().map(|&e| vec![e]).collect(),
        }
    }

    #[test]
    fn strategy_values() {
        let c = labels(&["s", "s", "s"]);
        assert_eq!(strategy(3, &[0, 0, 0]).value(&c).unwrap().exponent, 0);
        assert_eq!(strategy(3, &[1, 1, 1]).value(&c).unwrap().exponent, 0);
        assert_eq!(strategy(3, &[2, 2, 1]).value(&c).unwrap().exponent, 2);
        assert_eq!(
            strategy(3, &[0, 0, 0]).value(&labels(&["s", "s", "x"])),
            Err(LhvError::UnknownLabel("x".into()))
        );
    }

    #[test]
    fn congruences_of_three_qutrits() {
        let sys = three_qutrits().to_congruences().unwrap();
        assert_eq!(sys.num_vars, 6);
        // variables: x1 y1 x2 y2 x3 y3
        assert_eq!(
            sys.matrix,
            vec![
                vec![1, 0, 1, 0, 0, 1],
                vec![0, 1, 1, 0, 1, 0],
                vec![1, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 1, 0, 1],
            ]
        );
        assert_eq!(sys.rhs, vec![2, 2, 2, 0]);
        let empty = LhvProblem {
            constraints: vec![],
            ..three_qutrits()
        };
        assert_eq!(empty.to_congruences().unwrap().rows(), 0);
        let single = LhvProblem {
            dim: 3,
            parties: 1,
            menu: labels(&["a", "b"]),
            constraints: vec![constraint(&["b"], 1)],
        };
        assert_eq!(single.to_congruences().unwrap().matrix, vec![vec![0, 1]]);
    }

    #[test]
    fn three_qutrits_force_one() {
        let p = three_qutrits();
        let probe = labels(&["phi", "phi", "phi"]);
        let a = p.analyze(&probe, DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(a.solution.count, BigUint::from(9u32));
        assert_eq!(a.enumeration.as_ref().unwrap().count, 9);
        assert_eq!(a.achievable, BTreeSet::from([0]));
        let all = p.enumerate_consistent(DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(all.len(), 9);
        assert!(all.windows(2).all(|w| w[0].flat() < w[1].flat()));
        for s in &all {
            assert!(p.is_consistent(s).unwrap());
        }
        let particular = p.particular_strategy(&a.solution).unwrap();
        assert!(p.is_consistent(&particular).unwrap());
    }

    #[test]
    fn unconstrained_and_contradictory() {
        let free = LhvProblem {
            dim: 2,
            parties: 2,
            menu: labels(&["s"]),
            constraints: vec![],
        };
        assert_eq!(free.enumerate_consistent(100).unwrap().len(), 4);
        let vals = achievable_values(&free, &labels(&["s", "s"]), 100).unwrap();
        assert_eq!(vals.len(), 2);

        let bad = LhvProblem {
            constraints: vec![constraint(&["s", "s"], 0), constraint(&["s", "s"], 1)],
            ..free
        };
        assert!(bad.enumerate_consistent(100).unwrap().is_empty());
        assert!(achievable_values(&bad, &labels(&["s", "s"]), 100)
            .unwrap()
            .is_empty());
        assert!(!bad.solve().unwrap().is_consistent());
    }

    #[test]
    fn enumeration_cap_refuses() {
        let p = three_qutrits();
        assert!(matches!(
            p.enumerate_consistent(100),
            Err(LhvError::CapExceeded {
                size: 729,
                cap: 100
            })
        ));
        // analysis still runs, algebraically only
        let a = p.analyze(&labels(&["phi", "phi", "phi"]), 100).unwrap();
        assert!(a.enumeration.is_none());
        assert_eq!(a.achievable, BTreeSet::from([0]));
    }

    #[test]
    fn problem_validation() {
        let mut p = three_qutrits();
        p.constraints[0].exponent = 3;
        assert!(matches!(p.validate(), Err(LhvError::ExponentRange { .. })));
        let mut p = three_qutrits();
        p.constraints[1].choice.pop();
        assert!(matches!(p.validate(), Err(LhvError::ChoiceLength { .. })));
        let mut p = three_qutrits();
        p.menu.push("phi".into());
        assert!(matches!(p.validate(), Err(LhvError::DuplicateLabel(_))));
    }

    #[test]
    fn mixtures() {
        let c = labels(&["s"]);
        let one = strategy(3, &[1]);
        let two = strategy(3, &[2]);
        let single = mixture_correlation(&[(one.clone(), 1.0)], &c).unwrap();
        assert!((single - BellValue::new(1, 3).to_complex()).norm() < 1e-12);
        let half = mixture_correlation(&[(one.clone(), 0.5), (two.clone(), 0.5)], &c).unwrap();
        assert!((half - ComplexValue::new(-0.5, 0.0)).norm() < 1e-12);
        assert!(mixture_correlation(&[(one.clone(), 0.5)], &c).is_err());
        assert!(mixture_correlation(&[(one, 1.5), (two, -0.5)], &c).is_err());
        assert_eq!(mixture_correlation(&[], &c), Err(LhvError::EmptyMixture));
    }

    #[test]
    fn uniform_mixture_over_ghz_strategies_is_one() {
        let p = three_qutrits();
        let all = p.enumerate_consistent(DEFAULT_STRATEGY_CAP).unwrap();
        let w = 1.0 / all.len() as f64;
        let weighted: Vec<_> = all.into_iter().map(|s| (s, w)).collect();
        let e = mixture_correlation(&weighted, &labels(&["phi", "phi", "phi"])).unwrap();
        assert!((e - ComplexValue::new(1.0, 0.0)).norm() < 1e-12);
    }
}
