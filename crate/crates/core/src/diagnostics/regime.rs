use serde::{Deserialize, Serialize};

use super::divergence::{detect_divergence, DivergenceEvidence, DivergenceRule};
use super::maxima::{running_signed_max, Side};
use super::track::{default_guard, Track};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::{NonlinearitySpec, RealSeq};

/// Limit of a nonnegative ratio track: a finite value or the `+inf` regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Regime {
    Finite(f64),
    Infinite,
}

impl Regime {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct RegimeEstimate<T> {
    pub regime: Regime,
    pub track: Track<T>,
    pub evidence: Option<DivergenceEvidence>,
}

/// `lambda`: the track `H*_-(n) / H*_+(n)` and its limit.
pub fn estimate_lambda<T: Scalar>(h: &RealSeq<T>) -> Result<RegimeEstimate<T>> {
    estimate(h, |v| Ok(v), &DivergenceRule::default())
}

/// `lambda_2`: the track `H*_-(n) / f(H*_+(n))` and its limit.
pub fn estimate_lambda2<T: Scalar>(h: &RealSeq<T>, f: &NonlinearitySpec<T>) -> Result<RegimeEstimate<T>> {
    estimate(h, |v| f.eval(v), &DivergenceRule::default())
}

/// Shared estimator. The track starts at the first index where `H*_-` is
/// positive (if `H` ever goes negative) and has gaps wherever the
/// denominator is below the default guard.
pub fn estimate<T: Scalar>(
    h: &RealSeq<T>,
    den: impl Fn(T) -> Result<T>,
    rule: &DivergenceRule,
) -> Result<RegimeEstimate<T>> {
    let plus = running_signed_max(h, Side::Plus)?;
    let minus = running_signed_max(h, Side::Minus)?;
    let guard = default_guard::<T>();
    let mut values = Vec::with_capacity(h.len());
    for (&p, &m) in plus.values().values().iter().zip(minus.values().values()) {
        let d = if p > T::zero() { den(p)? } else { T::zero() };
        values.push((d >= guard).then(|| m / d));
    }
    let track = Track::new(h.start(), values);
    let first_negative = minus
        .values()
        .iter()
        .find(|&(_, m)| m > T::zero())
        .map(|(n, _)| n);
    let track = match first_negative {
        Some(n) => track.from_index(n),
        None => track,
    };
    if track.all_gaps() {
        if minus.last() > guard {
            return Ok(RegimeEstimate { regime: Regime::Infinite, track, evidence: None });
        }
        return Err(Error::Degenerate(
            "forcing has neither positive nor negative excursions beyond the guard".into(),
        ));
    }
    let evidence = detect_divergence(&track, rule);
    let regime = if evidence.as_ref().is_some_and(|e| e.divergent) {
        Regime::Infinite
    } else {
        let s = track.final_summary().expect("track has points");
        Regime::Finite(s.mean.max(0.0))
    };
    Ok(RegimeEstimate { regime, track, evidence })
}
