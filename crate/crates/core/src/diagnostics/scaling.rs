use serde::{Deserialize, Serialize};

use super::track::{default_guard, Track};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::{RealSeq, ScalerSpec};

/// Default fraction of indices kept by [`tail_sup_ratio`].
pub const DEFAULT_TAIL_FRACTION: f64 = 0.9;

/// Which values a tail supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupKind {
    /// `|seq(n)| / a(n)`
    Abs,
    /// `seq(n) / a(n)`
    Plus,
    /// `-seq(n) / a(n)`
    Minus,
}

/// Indices `[first, last]` of the final `tail_fraction` of `seq`.
pub fn tail_window<T: Scalar>(seq: &RealSeq<T>, tail_fraction: f64) -> Result<(usize, usize)> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Argument(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let last = seq
        .last_index()
        .ok_or_else(|| Error::Argument("tail window of an empty sequence".into()))?;
    let skip = ((1.0 - tail_fraction) * seq.len() as f64).floor() as usize;
    Ok((seq.start() + skip.min(seq.len() - 1), last))
}

/// `sup seq(n)/a(n)` (in the sense of `kind`) over the final `tail_fraction`
/// of indices, skipping indices where `a` is undefined.
pub fn tail_sup_ratio<T: Scalar>(
    seq: &RealSeq<T>,
    a: &ScalerSpec<T>,
    tail_fraction: f64,
    kind: SupKind,
) -> Result<T> {
    let (first, last) = tail_window(seq, tail_fraction)?;
    let first = first.max(a.first_index());
    if first > last {
        return Err(Error::Argument(format!(
            "tail window ends at {last}, before the scaler's domain starts"
        )));
    }
    let mut sup = T::neg_infinity();
    for n in first..=last {
        let v = seq.get(n).expect("index in range");
        let v = match kind {
            SupKind::Abs => v.abs(),
            SupKind::Plus => v,
            SupKind::Minus => -v,
        };
        sup = sup.max(v / a.eval(n)?);
    }
    Ok(sup)
}

/// `|seq(n)/a(n) - lambda(n)|`, with gaps where `a` is undefined.
pub fn lambda_a_residual<T: Scalar>(
    seq: &RealSeq<T>,
    a: &ScalerSpec<T>,
    lambda: &RealSeq<T>,
) -> Result<Track<T>> {
    if seq.start() != lambda.start() || seq.len() != lambda.len() {
        return Err(Error::Argument("residual of misaligned sequences".into()));
    }
    let guard = default_guard::<T>();
    let mut values = Vec::with_capacity(seq.len());
    for ((n, v), &l) in seq.iter().zip(lambda.values()) {
        if !a.contains(n) {
            values.push(None);
            continue;
        }
        let an = a.eval(n)?;
        if an < guard {
            return Err(Error::Degenerate(format!("scaler a({n}) = {an} is below the guard")));
        }
        values.push(Some((v / an - l).abs()));
    }
    Ok(Track::new(seq.start(), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaler_against_itself() {
        let a = ScalerSpec::<f64>::SqrtLog;
        let seq = RealSeq::x_like((0..1000).map(|n| if n < 2 { 0.0 } else { a.eval(n).unwrap() }).collect()).unwrap();
        assert_eq!(tail_sup_ratio(&seq, &a, 0.9, SupKind::Abs).unwrap(), 1.0);
        assert_eq!(tail_sup_ratio(&seq.negated(), &a, 0.9, SupKind::Minus).unwrap(), 1.0);
        let zeros = RealSeq::x_like(vec![0.0; 100]).unwrap();
        assert_eq!(tail_sup_ratio(&zeros, &a, 0.9, SupKind::Abs).unwrap(), 0.0);
        assert!(tail_sup_ratio(&zeros, &a, 0.0, SupKind::Abs).is_err());
        let tiny = RealSeq::x_like(vec![1.0]).unwrap();
        assert!(tail_sup_ratio(&tiny, &a, 0.9, SupKind::Abs).is_err());
    }

    #[test]
    fn residual_examples() {
        let a = ScalerSpec::power(1.0).unwrap();
        let lam = RealSeq::h_like(vec![1.0, 2.0, 0.5]).unwrap();
        let seq = RealSeq::h_like(vec![1.0, 4.0, 1.5]).unwrap();
        let r = lambda_a_residual(&seq, &a, &lam).unwrap();
        assert!(r.points().all(|(_, v)| v == 0.0));
        let zero = RealSeq::h_like(vec![0.0; 3]).unwrap();
        let own = RealSeq::h_like(vec![1.0, 2.0, 3.0]).unwrap();
        let r = lambda_a_residual(&own, &a, &zero).unwrap();
        assert!(r.points().all(|(_, v)| v == 1.0));
    }
}
