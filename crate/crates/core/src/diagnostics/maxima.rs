use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::RealSeq;

/// Which side of a sequence a signed running maximum follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Plus,
    Minus,
}

/// Running maximum of a transformed sequence together with the earliest
/// index at which each running maximum is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct MaxTrack<T> {
    values: RealSeq<T>,
    argmax: Vec<usize>,
}

impl<T: Scalar> MaxTrack<T> {
    fn build(seq: &RealSeq<T>, g: impl Fn(T) -> T) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::Argument("running maximum of an empty sequence".into()));
        }
        let mut values = Vec::with_capacity(seq.len());
        let mut argmax = Vec::with_capacity(seq.len());
        let mut best = T::neg_infinity();
        let mut at = seq.start();
        for (n, v) in seq.iter() {
            let v = g(v);
            // strict comparison keeps the earliest attaining index
            if v > best {
                best = v;
                at = n;
            }
            values.push(best);
            argmax.push(at);
        }
        Ok(Self { values: RealSeq::from_trusted(seq.start(), values), argmax })
    }

    pub fn values(&self) -> &RealSeq<T> {
        &self.values
    }

    /// `t_n`: earliest index attaining the running maximum, aligned with `values`.
    pub fn argmax_times(&self) -> &[usize] {
        &self.argmax
    }

    pub fn start(&self) -> usize {
        self.values.start()
    }

    pub fn len(&self) -> usize {
        self.argmax.len()
    }

    pub fn is_empty(&self) -> bool {
        self.argmax.is_empty()
    }

    /// Running maximum at absolute index `n`.
    pub fn at(&self, n: usize) -> Option<T> {
        self.values.get(n)
    }

    /// Record time at absolute index `n`.
    pub fn argmax_at(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.start()).and_then(|i| self.argmax.get(i).copied())
    }

    pub fn last(&self) -> T {
        *self.values.values().last().expect("nonempty track")
    }

    /// Indices at which the running maximum strictly increases (the first index included).
    pub fn record_times(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &t in &self.argmax {
            if out.last() != Some(&t) {
                out.push(t);
            }
        }
        out
    }

    pub fn prefix(&self, last: usize) -> Self {
        let values = self.values.prefix(last);
        let argmax = self.argmax[..values.len()].to_vec();
        Self { values, argmax }
    }
}

/// `max |seq(j)|` over the sequence's own index range: `H*` for H-like, `x*` for x-like input.
pub fn running_max_abs<T: Scalar>(seq: &RealSeq<T>) -> Result<MaxTrack<T>> {
    MaxTrack::build(seq, |v| v.abs())
}

/// `max seq(j)` (plus) or `max -seq(j)` (minus); negative until the sequence crosses that side.
pub fn running_signed_max<T: Scalar>(seq: &RealSeq<T>, side: Side) -> Result<MaxTrack<T>> {
    match side {
        Side::Plus => MaxTrack::build(seq, |v| v),
        Side::Minus => MaxTrack::build(seq, |v| -v),
    }
}
