use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Increasing, diverging auxiliary sequence `a(n)` used to normalise fluctuations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum ScalerSpec<T> {
    /// `a(n) = sqrt(2 log n)`, defined for `n >= 2`.
    SqrtLog,
    /// `a(n) = n^p`, `p > 0`, defined for `n >= 1`.
    Power { p: T },
    /// `a(n) = exp(rate * n)`, `rate > 0`.
    Exponential { rate: T },
    /// Explicit values `a(start), a(start + 1), ...`.
    Table { start: usize, values: Vec<T> },
}

impl<T: Scalar> ScalerSpec<T> {
    pub fn power(p: T) -> Result<Self> {
        let s = Self::Power { p };
        s.validate()?;
        Ok(s)
    }

    pub fn exponential(rate: T) -> Result<Self> {
        let s = Self::Exponential { rate };
        s.validate()?;
        Ok(s)
    }

    pub fn table(start: usize, values: Vec<T>) -> Result<Self> {
        let s = Self::Table { start, values };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SqrtLog => Ok(()),
            Self::Power { p } if *p > T::zero() && p.is_finite() => Ok(()),
            Self::Power { p } => Err(Error::InvalidSpec(format!(
                "power scaler needs p > 0, got {p}"
            ))),
            Self::Exponential { rate } if *rate > T::zero() && rate.is_finite() => Ok(()),
            Self::Exponential { rate } => Err(Error::InvalidSpec(format!(
                "exponential scaler needs rate > 0, got {rate}"
            ))),
            Self::Table { values, .. } => {
                if values.is_empty() {
                    return Err(Error::InvalidSpec("scaler table is empty".into()));
                }
                if values.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
                    return Err(Error::InvalidSpec(
                        "scaler table values must be finite and positive".into(),
                    ));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidSpec(
                        "scaler table values must be nondecreasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// First index at which `a` is defined.
    pub fn first_index(&self) -> usize {
        match self {
            Self::SqrtLog => 2,
            Self::Power { .. } => 1,
            Self::Exponential { .. } => 0,
            Self::Table { start, .. } => *start,
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        match self {
            Self::Table { start, values } => n >= *start && n - *start < values.len(),
            _ => n >= self.first_index(),
        }
    }

    /// `a(n)`.
    pub fn eval(&self, n: usize) -> Result<T> {
        if !self.contains(n) {
            return Err(Error::Domain(format!(
                "scaler {self:?} is not defined at n = {n}"
            )));
        }
        let v = match self {
            Self::SqrtLog => (T::of(2.0) * T::of(n as f64).ln()).sqrt(),
            Self::Power { p } => T::of(n as f64).powf(*p),
            Self::Exponential { rate } => (*rate * T::of(n as f64)).exp(),
            Self::Table { start, values } => values[n - start],
        };
        if !v.is_finite() {
            return Err(Error::Overflow {
                index: n,
                what: "scaler value is not representable".into(),
            });
        }
        Ok(v)
    }
}
