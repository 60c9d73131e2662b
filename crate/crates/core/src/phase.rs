//! Exact phases: rational multiples of π reduced into `[0, 2π)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised when constructing a phase from an invalid fraction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("phase denominator must be non-zero")]
    ZeroDenominator,
    #[error("phase fraction {num}/{den} overflows the supported range")]
    Overflow { num: i64, den: i64 },
}

/// A phase `(num / den)·π`, always stored reduced with `den ≥ 1` and
/// `0 ≤ num/den < 2`.
///
/// Keeping phases exact makes rewrite matching decidable (a phase is either
/// zero or it is not) and keeps canonical hashing stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPhase", into = "RawPhase")]
pub struct Phase {
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct RawPhase {
    num: i64,
    den: i64,
}

impl TryFrom<RawPhase> for Phase {
    type Error = PhaseError;
    fn try_from(raw: RawPhase) -> Result<Self, Self::Error> {
        Phase::new(raw.num, raw.den)
    }
}

impl From<Phase> for RawPhase {
    fn from(p: Phase) -> Self {
        RawPhase { num: p.num, den: p.den }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Phase {
    /// The phase `0`.
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    /// The phase `π`.
    pub const PI: Phase = Phase { num: 1, den: 1 };

    /// Builds `(num/den)·π`, reducing the fraction and wrapping it into `[0, 2)`.
    pub fn new(num: i64, den: i64) -> Result<Phase, PhaseError> {
        if den == 0 {
            return Err(PhaseError::ZeroDenominator);
        }
        Self::reduce(num as i128, den as i128).ok_or(PhaseError::Overflow { num, den })
    }

    fn reduce(num: i128, den: i128) -> Option<Phase> {
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        let period = 2 * den;
        num = num.rem_euclid(period);
        Some(Phase {
            num: i64::try_from(num).ok()?,
            den: i64::try_from(den).ok()?,
        })
    }

    /// Numerator of the reduced representative.
    pub fn num(self) -> i64 {
        self.num
    }

    /// Denominator of the reduced representative (always ≥ 1).
    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_pi(self) -> bool {
        self == Phase::PI
    }

    /// True for `0` and `π`, the phases whose states copy through spiders.
    pub fn is_pauli(self) -> bool {
        self.den == 1
    }

    /// The phase in radians, in `[0, 2π)`.
    pub fn radians(self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        let num = self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128;
        let den = self.den as i128 * rhs.den as i128;
        Phase::reduce(num, den).expect("sum of reduced phases stays in range")
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::reduce(-(self.num as i128), self.den as i128).expect("negation stays in range")
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "π"),
            (n, 1) => write!(f, "{n}π"),
            (1, d) => write!(f, "π/{d}"),
            (n, d) => write!(f, "{n}π/{d}"),
        }
    }
}
