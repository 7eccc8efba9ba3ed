//! Linear congruence systems `A x = b (mod N)` for arbitrary, possibly
//! composite, moduli.
//!
//! The matrix is diagonalized with unimodular integer row and column
//! operations (extended-gcd 2x2 blocks), reducing every entry mod `N` as we
//! go. Integer-unimodular matrices stay invertible mod `N`, so the
//! diagonal system `D z = U b` has exactly the solutions of the original
//! one under `x = V z`, and each diagonal entry `d` contributes
//! `gcd(d, N)` solutions when `gcd(d, N)` divides its right-hand side.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::LhvError;

/// `matrix * x = rhs (mod modulus)` over `num_vars` unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSystem {
    pub modulus: u64,
    pub num_vars: usize,
    pub matrix: Vec<Vec<u64>>,
    pub rhs: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

/// Complete description of the solutions of a [`CongruenceSystem`]: a
/// particular solution plus generators of the homogeneous solution group.
/// The group is the direct sum of the cyclic groups generated by
/// `kernel_basis[i]`, each of order `kernel_orders[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub modulus: u64,
    pub status: Consistency,
    pub particular: Option<Vec<u64>>,
    pub kernel_basis: Vec<Vec<u64>>,
    pub kernel_orders: Vec<u64>,
    pub count: BigUint,
}

impl CongruenceSystem {
    pub fn new(
        modulus: u64,
        num_vars: usize,
        matrix: Vec<Vec<u64>>,
        rhs: Vec<u64>,
    ) -> Result<Self, LhvError> {
        let system = CongruenceSystem {
            modulus,
            num_vars,
            matrix,
            rhs,
        };
        system.validate()?;
        Ok(system)
    }

    pub fn validate(&self) -> Result<(), LhvError> {
        if self.modulus == 0 {
            return Err(LhvError::ZeroModulus);
        }
        if self.matrix.len() != self.rhs.len() {
            return Err(LhvError::Shape(format!(
                "{} rows but {} right-hand sides",
                self.matrix.len(),
                self.rhs.len()
            )));
        }
        if let Some(i) = self.matrix.iter().position(|r| r.len() != self.num_vars) {
            return Err(LhvError::Shape(format!(
                "row {i} has {} coefficients, expected {}",
                self.matrix[i].len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    /// Whether `x` satisfies every congruence.
    pub fn is_satisfied_by(&self, x: &[u64]) -> bool {
        let n = self.modulus as u128;
        x.len() == self.num_vars
            && self.matrix.iter().zip(&self.rhs).all(|(row, &b)| {
                let lhs = row
                    .iter()
                    .zip(x)
                    .fold(0u128, |acc, (&a, &xi)| (acc + a as u128 * xi as u128) % n);
                lhs == b as u128 % n
            })
    }

    /// Solves the system exactly.
    pub fn solve(&self) -> Result<SolutionSet, LhvError> {
        self.validate()?;
        let n = self.modulus as i128;
        let rows = self.rows();
        let vars = self.num_vars;
        let mut a: Vec<Vec<i128>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| x as i128 % n).collect())
            .collect();
        let mut b: Vec<i128> = self.rhs.iter().map(|&x| x as i128 % n).collect();
        let mut v: Vec<Vec<i128>> = (0..vars)
            .map(|i| (0..vars).map(|j| i128::from(i == j)).collect())
            .collect();

        let mut rank = 0;
        while rank < rows.min(vars) {
            let Some((pi, pj)) = smallest_entry(&a, rank) else {
                break;
            };
            a.swap(rank, pi);
            b.swap(rank, pi);
            swap_columns(&mut a, rank, pj);
            swap_columns(&mut v, rank, pj);

            let t = rank;
            loop {
                for i in t + 1..rows {
                    if a[i][t] != 0 {
                        combine_rows(&mut a, &mut b, t, i, n);
                    }
                }
                for j in t + 1..vars {
                    if a[t][j] != 0 {
                        combine_columns(&mut a, &mut v, t, j, n);
                    }
                }
                if (t + 1..rows).all(|i| a[i][t] == 0) {
                    break;
                }
            }
            rank += 1;
        }

        if b[rank..].iter().any(|&c| c != 0) {
            return Ok(SolutionSet::inconsistent(self.modulus));
        }

        let mut z = vec![0i128; vars];
        let mut kernel_basis = Vec::new();
        let mut kernel_orders = Vec::new();
        for i in 0..rank {
            let d = a[i][i];
            let g = d.gcd(&n);
            if b[i] % g != 0 {
                return Ok(SolutionSet::inconsistent(self.modulus));
            }
            let reduced = n / g;
            z[i] = if reduced == 1 {
                0
            } else {
                let inv = mod_inverse(d / g, reduced).expect("d/g is a unit mod n/g");
                (b[i] / g % reduced) * inv % reduced
            };
            if g > 1 {
                kernel_basis.push(column_times(&v, i, reduced, n));
                kernel_orders.push(g as u64);
            }
        }
        for j in rank..vars {
            kernel_basis.push(column_times(&v, j, 1, n));
            kernel_orders.push(self.modulus);
        }

        let particular: Vec<u64> = (0..vars)
            .map(|r| {
                ((0..vars)
                    .map(|c| v[r][c] * z[c])
                    .sum::<i128>()
                    .rem_euclid(n)) as u64
            })
            .collect();
        let count = kernel_orders
            .iter()
            .fold(BigUint::from(1u32), |acc, &o| acc * BigUint::from(o));
        Ok(SolutionSet {
            modulus: self.modulus,
            status: Consistency::Consistent,
            particular: Some(particular),
            kernel_basis,
            kernel_orders,
            count,
        })
    }
}

impl SolutionSet {
    fn inconsistent(modulus: u64) -> Self {
        SolutionSet {
            modulus,
            status: Consistency::Inconsistent,
            particular: None,
            kernel_basis: Vec::new(),
            kernel_orders: Vec::new(),
            count: BigUint::from(0u32),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Consistency::Consistent
    }

    /// The set `{ row . x mod N : x a solution }`. A coset of the subgroup
    /// generated by `gcd(N, row . k)` over kernel generators `k`.
    pub fn linear_form_values(&self, row: &[u64]) -> BTreeSet<u64> {
        let Some(x0) = &self.particular else {
            return BTreeSet::new();
        };
        let n = self.modulus;
        let dot = |x: &[u64]| -> u64 {
            row.iter().zip(x).fold(0u128, |acc, (&a, &b)| {
                (acc + a as u128 * b as u128) % n as u128
            }) as u64
        };
        let step = self.kernel_basis.iter().fold(n, |g, k| g.gcd(&dot(k)));
        let base = dot(x0) % step;
        (0..n / step).map(|t| base + t * step).collect()
    }
}

fn smallest_entry(a: &[Vec<i128>], from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i128, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(from) {
        for (j, &x) in row.iter().enumerate().skip(from) {
            if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                best = Some((x, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn swap_columns(m: &mut [Vec<i128>], i: usize, j: usize) {
    if i != j {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Coefficients `(s, u)` of the unimodular block `[[s, u], [-q/g, p/g]]`
/// that maps `(p, q)` to `(gcd(p, q), 0)`.
fn elimination_block(p: i128, q: i128) -> (i128, i128, i128) {
    if q % p == 0 {
        return (p, 1, 0);
    }
    let e = p.extended_gcd(&q);
    (e.gcd, e.x, e.y)
}

/// Zeroes `a[i][t]` using row `t`, keeping `b` in step.
fn combine_rows(a: &mut [Vec<i128>], b: &mut [i128], t: usize, i: usize, n: i128) {
    let (p, q) = (a[t][t], a[i][t]);
    let (g, s, u) = elimination_block(p, q);
    let (c, d) = (-(q / g), p / g);
    let mix = |x: i128, y: i128| ((s * x + u * y).rem_euclid(n), (c * x + d * y).rem_euclid(n));
    for col in 0..a[t].len() {
        (a[t][col], a[i][col]) = mix(a[t][col], a[i][col]);
    }
    (b[t], b[i]) = mix(b[t], b[i]);
}

/// Zeroes `a[t][j]` using column `t`, applying the same operation to `v`.
fn combine_columns(a: &mut [Vec<i128>], v: &mut [Vec<i128>], t: usize, j: usize, n: i128) {
    let (p, q) = (a[t][t], a[t][j]);
    let (g, s, u) = elimination_block(p, q);
    let (c, d) = (-(q / g), p / g);
    for m in [a, v] {
        for row in m.iter_mut() {
            let (x, y) = (row[t], row[j]);
            row[t] = (s * x + u * y).rem_euclid(n);
            row[j] = (c * x + d * y).rem_euclid(n);
        }
    }
}

fn column_times(v: &[Vec<i128>], col: usize, factor: i128, n: i128) -> Vec<u64> {
    v.iter()
        .map(|row| (row[col] * factor).rem_euclid(n) as u64)
        .collect()
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}
