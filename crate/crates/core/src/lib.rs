//! Simulation of `N`-party GHZ experiments with `N`-port Bell multiports,
//! and mechanical certification of the resulting GHZ paradoxes.
//!
//! - [`angles`]: exact phases as rational fractions of a turn.
//! - [`quantum`]: state, outcome probabilities and the Bell-number
//!   correlation function, by brute force and in closed form.
//! - [`lhv`]: deterministic local-hidden-variable strategies as linear
//!   congruences over `Z_N`.
//! - [`paradox`]: the setting families and paradox certificates.
//! - [`cli`]: the command-line front end.

pub mod angles;
pub mod cli;
pub mod lhv;
pub mod paradox;
pub mod quantum;

pub use angles::{ComplexValue, Turn};
pub use lhv::{LhvProblem, LhvStrategy, ProductConstraint, SolutionSet};
pub use paradox::{build_certificate, ParadoxCertificate};
pub use quantum::{BellValue, ExperimentConfig, LocalSetting, Outcome};
