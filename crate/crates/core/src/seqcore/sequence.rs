use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite real sequence together with the index of its first element.
///
/// Solution-like sequences start at 0 (`x(0) = xi`), forcing-like sequences
/// start at 1. All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct RealSeq<T> {
    start: usize,
    values: Vec<T>,
}

impl<T: Scalar> RealSeq<T> {
    pub fn new(start: usize, values: Vec<T>) -> Result<Self> {
        if start > 1 {
            return Err(Error::Argument(format!(
                "sequence start index must be 0 or 1, got {start}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Overflow {
                index: start + pos,
                what: "non-finite sequence entry".into(),
            });
        }
        Ok(Self { start, values })
    }

    /// Sequence indexed from 0, like `x`.
    pub fn x_like(values: Vec<T>) -> Result<Self> {
        Self::new(0, values)
    }

    /// Sequence indexed from 1, like `H`.
    pub fn h_like(values: Vec<T>) -> Result<Self> {
        Self::new(1, values)
    }

    pub(crate) fn from_trusted(start: usize, values: Vec<T>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { start, values }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last element; `None` for an empty sequence.
    pub fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.start + self.values.len() - 1)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at absolute index `n`.
    pub fn get(&self, n: usize) -> Option<T> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(i).copied())
    }

    /// Iterator over `(index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.start + i, v))
    }

    /// The sub-sequence of all indices `<= last`.
    pub fn prefix(&self, last: usize) -> Self {
        let keep = (last + 1).saturating_sub(self.start).min(self.values.len());
        Self {
            start: self.start,
            values: self.values[..keep].to_vec(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.start, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn negated(&self) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|&v| -v).collect(),
        }
    }
}
