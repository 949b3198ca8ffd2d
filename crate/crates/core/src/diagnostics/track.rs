use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::RealSeq;

/// Fraction of indices used for final-window summaries.
pub const FINAL_WINDOW: f64 = 0.1;

/// Default absolute guard below which a denominator counts as zero.
pub fn default_guard<T: Scalar>() -> T {
    T::of(1e-300).max(T::min_positive_value())
}

/// Mean, minimum and maximum over a window of a track, ignoring gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub first_index: usize,
    pub last_index: usize,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// A derived sequence indexed from `start` in which some points may be gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Track<T> {
    start: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> Track<T> {
    pub fn new(start: usize, values: Vec<Option<T>>) -> Self {
        Self { start, values }
    }

    pub fn from_seq(seq: &RealSeq<T>) -> Self {
        Self::new(seq.start(), seq.values().iter().map(|&v| Some(v)).collect())
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

    pub fn values(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<T> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(i).copied().flatten())
    }

    pub fn gaps(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn all_gaps(&self) -> bool {
        self.values.iter().all(|v| v.is_none())
    }

    /// Non-gap points as `(index, value)`.
    pub fn points(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(i, v)| v.map(|v| (self.start + i, v)))
    }

    pub fn last_point(&self) -> Option<(usize, T)> {
        self.values
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, v)| v.map(|v| (self.start + i, v)))
    }

    /// Summary over the final `fraction` of the index range (at least one index).
    pub fn window_summary(&self, fraction: f64) -> Option<WindowSummary> {
        if self.values.is_empty() {
            return None;
        }
        let len = self.values.len();
        let keep = ((fraction * len as f64).ceil() as usize).clamp(1, len);
        self.summary_over(len - keep, len)
    }

    /// Summary over the default final window.
    pub fn final_summary(&self) -> Option<WindowSummary> {
        self.window_summary(FINAL_WINDOW)
    }

    fn summary_over(&self, lo: usize, hi: usize) -> Option<WindowSummary> {
        let (mut count, mut sum) = (0usize, 0.0);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in self.values[lo..hi].iter().flatten() {
            let v = v.as_f64();
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        (count > 0).then(|| WindowSummary {
            first_index: self.start + lo,
            last_index: self.start + hi - 1,
            count,
            mean: sum / count as f64,
            min,
            max,
        })
    }

    /// The track restricted to indices `<= last`.
    pub fn prefix(&self, last: usize) -> Self {
        let keep = (last + 1).saturating_sub(self.start).min(self.values.len());
        Self::new(self.start, self.values[..keep].to_vec())
    }

    /// Drop all indices below `first`.
    pub fn from_index(&self, first: usize) -> Self {
        let skip = first.saturating_sub(self.start).min(self.values.len());
        Self::new(self.start + skip, self.values[skip..].to_vec())
    }
}

/// `num(n) / den(n)` where `|den(n)| >= guard`, a gap elsewhere.
///
/// Fails if the ranges are not aligned; an all-gap result is returned as is
/// and can be detected with [`Track::all_gaps`].
pub fn ratio_track<T: Scalar>(num: &RealSeq<T>, den: &RealSeq<T>, guard: T) -> Result<Track<T>> {
    if num.start() != den.start() || num.len() != den.len() {
        return Err(Error::Argument(format!(
            "ratio of misaligned sequences: [{}; {}] vs [{}; {}]",
            num.start(),
            num.len(),
            den.start(),
            den.len()
        )));
    }
    if !(guard > T::zero()) {
        return Err(Error::Argument("ratio guard must be positive".into()));
    }
    let values = num
        .values()
        .iter()
        .zip(den.values())
        .map(|(&a, &b)| (b.abs() >= guard).then(|| a / b))
        .collect();
    Ok(Track::new(num.start(), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: Vec<f64>) -> RealSeq<f64> {
        RealSeq::h_like(v).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let a = h(vec![3.0, -2.0, 7.0]);
        let t = ratio_track(&a, &a, 1e-300).unwrap();
        assert!(t.points().all(|(_, v)| v == 1.0));
        let t = ratio_track(&h(vec![2.0, 4.0]), &h(vec![1.0, 2.0]), 1e-300).unwrap();
        assert_eq!(t.values(), &[Some(2.0), Some(2.0)]);
        let t = ratio_track(&h(vec![2.0, 4.0]), &h(vec![0.0, 0.0]), 1e-300).unwrap();
        assert!(t.all_gaps());
        assert_eq!(t.gaps(), 2);
        assert!(t.final_summary().is_none());
        assert!(ratio_track(&h(vec![1.0]), &h(vec![1.0, 2.0]), 1e-300).is_err());
    }

    #[test]
    fn summaries_skip_gaps() {
        let values: Vec<Option<f64>> = (0..20)
            .map(|i| (i != 19).then_some(i as f64))
            .collect();
        let t = Track::new(1, values);
        let s = t.final_summary().unwrap();
        assert_eq!((s.first_index, s.last_index, s.count), (19, 20, 1));
        assert_eq!(s.mean, 18.0);
        let s = t.window_summary(0.5).unwrap();
        assert_eq!(s.count, 9);
        assert_eq!((s.min, s.max), (10.0, 18.0));
        assert_eq!(t.last_point(), Some((19, 18.0)));
        assert_eq!(t.get(20), None);
        assert_eq!(t.prefix(5).len(), 5);
        let tail = t.from_index(11);
        assert_eq!(tail.start(), 11);
        assert_eq!(tail.get(11), Some(10.0));
    }
}
