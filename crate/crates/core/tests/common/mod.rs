//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code)]

use num_complex::Complex64;
use qunit_ghz::{ExperimentConfig, LocalSetting, Turn};
use rand::Rng;

/// Full `N^M` state-vector simulation: prepare the GHZ state, apply each
/// party's phases and then its multiport (built here from scratch), and
/// read off `|amplitude|^2` for every outcome in lexicographic order.
pub fn dense_distribution(config: &ExperimentConfig) -> Vec<f64> {
    let n = config.dim;
    let m = config.parties;
    let size = n.pow(m as u32);
    let tau = std::f64::consts::TAU;
    let mut psi = vec![Complex64::new(0.0, 0.0); size];
    let stride: usize = (0..m).map(|l| n.pow(l as u32)).sum();
    for j in 0..n {
        let phase: f64 = config
            .settings
            .iter()
            .map(|s| tau * s.0[j].num() as f64 / s.0[j].den() as f64)
            .sum();
        psi[j * stride] = Complex64::from_polar(1.0 / (n as f64).sqrt(), phase);
    }
    let u: Vec<Complex64> = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            Complex64::from_polar(1.0 / (n as f64).sqrt(), tau * (a * b) as f64 / n as f64)
        })
        .collect();
    // apply U on every tensor factor; party l has stride n^(m-1-l)
    #[allow(clippy::needless_range_loop)]
    for l in 0..m {
        let st = n.pow((m - 1 - l) as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); size];
        for idx in 0..size {
            let digit = (idx / st) % n;
            let base = idx - digit * st;
            for out in 0..n {
                next[base + out * st] += u[out * n + digit] * psi[idx];
            }
        }
        psi = next;
    }
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Correlation from the dense distribution with Bell numbers computed
/// independently of the library.
pub fn dense_correlation(config: &ExperimentConfig) -> Complex64 {
    let n = config.dim;
    let probs = dense_distribution(config);
    probs
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut s = 0;
            let mut i = idx;
            for _ in 0..config.parties {
                s += i % n;
                i /= n;
            }
            Complex64::from_polar(*p, std::f64::consts::TAU * (s % n) as f64 / n as f64)
        })
        .sum()
}

pub fn random_turn<R: Rng>(rng: &mut R, max_den: i64) -> Turn {
    let den = rng.gen_range(1..=max_den);
    Turn::from_fraction(rng.gen_range(0..den), den).unwrap()
}

pub fn random_config<R: Rng>(rng: &mut R, dim: usize, parties: usize) -> ExperimentConfig {
    let settings = (0..parties)
        .map(|_| LocalSetting((0..dim).map(|_| random_turn(rng, 24)).collect()))
        .collect();
    ExperimentConfig::new(dim, settings).unwrap()
}

pub fn turns(ts: &[(i64, i64)]) -> LocalSetting {
    LocalSetting(
        ts.iter()
            .map(|&(a, b)| Turn::from_fraction(a, b).unwrap())
            .collect(),
    )
}

pub fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `sum_l (phi_l^1 - phi_l^2)` in radians.
pub fn two_port_phase_sum(config: &ExperimentConfig) -> f64 {
    config
        .settings
        .iter()
        .map(|s| s.0[0].radians() - s.0[1].radians())
        .sum()
}
