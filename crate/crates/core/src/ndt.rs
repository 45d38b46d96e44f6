//! Exact normalized delivery time.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::WmrArray;
use crate::report::VerificationReport;

/// A non-negative exact rational, serialized as `{"num": .., "den": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Ratio<u64>);

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        Self(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Self::new(0, 1)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: u64,
    den: u64,
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        RationalJson {
            num: self.numer(),
            den: self.denom(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RationalJson::deserialize(de)?;
        if raw.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(raw.num, raw.den))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NdtError {
    #[error("array fails verification:\n{0}")]
    InvalidArray(VerificationReport),
    #[error("load r={r} outside [1, K] for K={k}")]
    InvalidLoad { k: usize, r: usize },
}

/// Delivery time `S / (N K)` of the scheme an array induces (with `Q = K`).
pub fn ndt(a: &WmrArray) -> Result<Rational, NdtError> {
    let report = a.verify();
    if !report.passed {
        return Err(NdtError::InvalidArray(report));
    }
    Ok(Rational::new(a.s() as u64, (a.n() * a.k()) as u64))
}

/// The one-shot linear optimum `(1 - r/K) / min{2r, K}`.
pub fn optimal_ndt(k: usize, r: usize) -> Result<Rational, NdtError> {
    if r < 1 || r > k {
        return Err(NdtError::InvalidLoad { k, r });
    }
    let g = (2 * r).min(k);
    Ok(Rational::new((k - r) as u64, (k * g) as u64))
}
