use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::RealSeq;

/// Increasing convex weight `phi` on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ConvexWeight<T> {
    /// `phi(u) = u^p`, `p >= 1`.
    Power { p: T },
    /// `phi(u) = exp(a u^2)`, `a > 0`.
    GaussianExp { a: T },
}

/// A weight together with the inflation `phi((1 + eta) u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct ConvexWeightSpec<T> {
    #[serde(flatten)]
    pub weight: ConvexWeight<T>,
    #[serde(default)]
    pub eta: T,
}

impl<T: Scalar> ConvexWeightSpec<T> {
    pub fn power(p: T) -> Result<Self> {
        let s = Self { weight: ConvexWeight::Power { p }, eta: T::zero() };
        s.validate()?;
        Ok(s)
    }

    pub fn gaussian_exp(a: T) -> Result<Self> {
        let s = Self { weight: ConvexWeight::GaussianExp { a }, eta: T::zero() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_eta(mut self, eta: T) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= T::zero() && self.eta.is_finite()) {
            return Err(Error::InvalidSpec(format!("eta must be nonnegative, got {}", self.eta)));
        }
        match self.weight {
            ConvexWeight::Power { p } if !(p >= T::one() && p.is_finite()) => {
                Err(Error::InvalidSpec(format!("power weight needs p >= 1, got {p}")))
            }
            ConvexWeight::GaussianExp { a } if !(a > T::zero() && a.is_finite()) => {
                Err(Error::InvalidSpec(format!("gaussian-exp weight needs a > 0, got {a}")))
            }
            _ => Ok(()),
        }
    }

    /// `phi((1 + eta) u)` for `u >= 0`.
    pub fn eval(&self, u: T) -> T {
        let u = (T::one() + self.eta) * u;
        match self.weight {
            ConvexWeight::Power { p } => match integer_power(p) {
                Some(k) => u.powi(k),
                None => u.powf(p),
            },
            ConvexWeight::GaussianExp { a } => (a * u * u).exp(),
        }
    }
}

fn integer_power<T: Scalar>(p: T) -> Option<i32> {
    let r = p.round();
    (r == p && r <= T::of(64.0)).then(|| r.as_f64() as i32)
}

/// Running averages `A(n)` of `phi((1 + eta)|seq(j)|)` over `j` from the
/// sequence's start index to `n`, divided by the number of terms.
pub fn phi_time_average<T: Scalar>(seq: &RealSeq<T>, w: &ConvexWeightSpec<T>) -> Result<RealSeq<T>> {
    w.validate()?;
    let mut out = Vec::with_capacity(seq.len());
    let mut sum = T::zero();
    for (count, (n, v)) in seq.iter().enumerate() {
        let phi = w.eval(v.abs());
        sum = sum + phi;
        if !sum.is_finite() {
            return Err(Error::Overflow {
                index: n,
                what: "phi-weighted sum is not representable".into(),
            });
        }
        out.push(sum / T::of((count + 1) as f64));
    }
    Ok(RealSeq::from_trusted(seq.start(), out))
}

/// [`phi_time_average`] with `phi(u) = u^p` and no inflation.
pub fn pth_moment_track<T: Scalar>(seq: &RealSeq<T>, p: T) -> Result<RealSeq<T>> {
    phi_time_average(seq, &ConvexWeightSpec::power(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let s = RealSeq::h_like(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pth_moment_track(&s, 1.0).unwrap().values(), &[1.0, 1.5, 2.0]);
        let c = RealSeq::h_like(vec![1.7; 5]).unwrap();
        let a = pth_moment_track(&c, 3.0).unwrap();
        assert!(a.values().iter().all(|&v| v == 1.7f64.powi(3)));
        let twos = RealSeq::h_like(vec![2.0; 3]).unwrap();
        assert_eq!(pth_moment_track(&twos, 1.0).unwrap().values(), &[2.0, 2.0, 2.0]);
        assert!(pth_moment_track(&twos, 0.5).is_err());
        assert!(ConvexWeightSpec::<f64>::gaussian_exp(0.0).is_err());
    }

    #[test]
    fn overflow_is_reported_with_index() {
        let s = RealSeq::h_like(vec![1.0, 40.0, 1.0]).unwrap();
        let w = ConvexWeightSpec::gaussian_exp(1.0).unwrap();
        let err = phi_time_average(&s, &w).unwrap_err();
        assert!(matches!(err, Error::Overflow { index: 2, .. }), "{err:?}");
    }

    #[test]
    fn inflation() {
        let s = RealSeq::h_like(vec![1.0]).unwrap();
        let w = ConvexWeightSpec::power(2.0).unwrap().with_eta(1.0).unwrap();
        assert_eq!(phi_time_average(&s, &w).unwrap().values(), &[4.0]);
    }
}
