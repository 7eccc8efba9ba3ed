//! Exact phases as rational fractions of a full turn.
//!
//! Every phase shifter setting used by the multiport experiments is a
//! rational multiple of pi, so phases are kept as reduced fractions of
//! 2pi and only turned into floating complex numbers at evaluation time.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Complex amplitudes, probabilities-as-complex and correlation values.
pub type ComplexValue = Complex64;

/// Largest admissible denominator of a canonical [`Turn`].
pub const MAX_DENOMINATOR: i64 = 1 << 31;

/// Absolute tolerance for floating comparisons at the angle layer.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("turn denominator must be positive")]
    ZeroDenominator,
    #[error("turn denominator {0} exceeds the cap of 2^31")]
    DenominatorOverflow(i128),
    #[error("cannot parse turn {0:?}: expected \"num/den\" or an integer")]
    Parse(String),
}

/// An angle of `num/den` full turns, i.e. `2*pi*num/den` radians, stored
/// in canonical form: `0 <= num < den`, `gcd(num, den) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Turn {
    num: i64,
    den: i64,
}

#[allow(clippy::should_implement_trait)] // fallible, so not the std ops traits
impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };

    /// Builds the canonical turn equal to `num/den` modulo one.
    pub fn from_fraction(num: i64, den: i64) -> Result<Turn, AngleError> {
        if den == 0 {
            return Err(AngleError::ZeroDenominator);
        }
        Self::canonical(num as i128, den as i128)
    }

    fn canonical(num: i128, den: i128) -> Result<Turn, AngleError> {
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let num = num.rem_euclid(den);
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if den > MAX_DENOMINATOR as i128 {
            return Err(AngleError::DenominatorOverflow(den));
        }
        Ok(Turn {
            num: num as i64,
            den: den as i64,
        })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `self + other` modulo one full turn.
    pub fn add(self, other: Turn) -> Result<Turn, AngleError> {
        let (a, b) = (self.den as i128, other.den as i128);
        let den = a.lcm(&b);
        let num = self.num as i128 * (den / a) + other.num as i128 * (den / b);
        Self::canonical(num, den)
    }

    pub fn neg(self) -> Turn {
        // the negation of a canonical turn never changes its denominator
        Turn::canonical(-(self.num as i128), self.den as i128).expect("same denominator")
    }

    pub fn sub(self, other: Turn) -> Result<Turn, AngleError> {
        self.add(other.neg())
    }

    /// `k * self` modulo one full turn.
    pub fn scale(self, k: i64) -> Result<Turn, AngleError> {
        Self::canonical(self.num as i128 * k as i128, self.den as i128)
    }

    /// Fraction of a full turn as a float in `[0, 1)`.
    pub fn as_fraction(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn radians(self) -> f64 {
        std::f64::consts::TAU * self.as_fraction()
    }

    /// `exp(i * 2pi * self)`.
    pub fn to_complex(self) -> ComplexValue {
        let (s, c) = self.radians().sin_cos();
        Complex64::new(c, s)
    }

    /// Returns `e` in `0..n` with `self == e/n`, if `self` is an `n`-th root
    /// of unity.
    pub fn root_exponent(self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        let scaled = self.num as i128 * n as i128;
        if scaled % self.den as i128 == 0 {
            Some((scaled / self.den as i128) as u64 % n)
        } else {
            None
        }
    }

    /// The turn `e/n`, i.e. the phase of `gamma_n^e`.
    pub fn root_of_unity(e: i64, n: u64) -> Result<Turn, AngleError> {
        Turn::from_fraction(e, n as i64)
    }

    /// Sums turns exactly.
    pub fn sum<I: IntoIterator<Item = Turn>>(turns: I) -> Result<Turn, AngleError> {
        turns.into_iter().try_fold(Turn::ZERO, Turn::add)
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Turn {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AngleError::Parse(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Turn::from_fraction(n, d)
            }
            None => {
                let n: i64 = t.parse().map_err(|_| bad())?;
                Turn::from_fraction(n, 1)
            }
        }
    }
}

impl Serialize for Turn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Turn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `gamma_n^e = exp(2 pi i e / n)` evaluated directly in floating point.
pub fn root_of_unity_complex(e: i64, n: u64) -> ComplexValue {
    let frac = e.rem_euclid(n as i64) as f64 / n as f64;
    let (s, c) = (std::f64::consts::TAU * frac).sin_cos();
    Complex64::new(c, s)
}
