//! Roots of unity as reduced fractions in ℚ/ℤ.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The root of unity `exp(2πi·num/den)`, stored as the reduced fraction
/// `num/den` with `0 ≤ num < den`.
///
/// Ordering is by denominator first, then numerator, so `0/1 < 1/2 < 1/3 < 2/3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    den: u64,
    num: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { den: 1, num: 0 };

    /// Builds `num/den mod 1`. Panics on `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let r = (num as i128).rem_euclid(d);
        let g = (r as u64).gcd(&den);
        let g = if g == 0 { den } else { g };
        RootOfUnity {
            den: den / g,
            num: r as u64 / g,
        }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// Multiplicative order of the root.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    /// Complex conjugate (= inverse), i.e. negation in ℚ/ℤ.
    pub fn conj(self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    /// Whether `self^d = 1`.
    pub fn is_killed_by(self, d: u64) -> bool {
        d % self.den == 0
    }

    /// Group operation of ℚ/ℤ (product of roots).
    pub fn mul(self, other: Self) -> Self {
        let den = self.den.lcm(&other.den);
        let a = self.num * (den / self.den) + other.num * (den / other.den);
        RootOfUnity::new(a as i64, den)
    }
}

impl Default for RootOfUnity {
    fn default() -> Self {
        RootOfUnity::ONE
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid root of unity `{0}` (expected a/b with b > 0)")]
pub struct ParseRootError(pub String);

impl FromStr for RootOfUnity {
    type Err = ParseRootError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRootError(s.to_string());
        let s = s.trim();
        let (a, b) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let a: i64 = a.parse().map_err(|_| err())?;
        let b: u64 = b.parse().map_err(|_| err())?;
        if b == 0 {
            return Err(err());
        }
        Ok(RootOfUnity::new(a, b))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
