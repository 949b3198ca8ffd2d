use serde::{Deserialize, Serialize};

use super::track::Track;
use crate::scalar::Scalar;

/// Finite-sample test for a track that tends to `+inf`.
///
/// The track is cut into log-spaced index windows. It is declared divergent
/// when the window means are nondecreasing and either the final window's
/// minimum exceeds `growth_factor` times the first window's maximum, or the
/// log-log slope of the window means over the second half of the windows is
/// at least `min_slope`. The slope rule catches power growth that is too slow
/// to gain a factor of ten within a desk-scale horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRule {
    pub windows: usize,
    pub growth_factor: f64,
    pub min_slope: f64,
}

impl Default for DivergenceRule {
    fn default() -> Self {
        Self { windows: 8, growth_factor: 10.0, min_slope: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEvidence {
    pub window_means: Vec<f64>,
    pub increasing: bool,
    /// Final-window minimum over first-window maximum.
    pub growth: f64,
    /// Log-log slope of window means over the second half of the windows.
    pub slope: Option<f64>,
    pub divergent: bool,
}

struct Window {
    center: f64,
    mean: f64,
    min: f64,
    max: f64,
}

/// Apply `rule` to the non-gap points of `track`; `None` when fewer than
/// three windows receive points.
pub fn detect_divergence<T: Scalar>(track: &Track<T>, rule: &DivergenceRule) -> Option<DivergenceEvidence> {
    let points: Vec<(usize, f64)> = track.points().map(|(n, v)| (n, v.as_f64())).collect();
    let (first, last) = (points.first()?.0.max(1) as f64, points.last()?.0.max(1) as f64);
    if last <= first || rule.windows < 3 {
        return None;
    }
    let w = rule.windows;
    let edge = |i: usize| first * (last / first).powf(i as f64 / w as f64);
    let mut windows = Vec::with_capacity(w);
    let mut it = points.iter().peekable();
    for i in 0..w {
        let (lo, hi) = (edge(i), edge(i + 1));
        let (mut count, mut sum) = (0usize, 0.0);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        while let Some(&&(n, v)) = it.peek() {
            let n = (n.max(1)) as f64;
            if n >= hi && i + 1 < w {
                break;
            }
            it.next();
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        if count > 0 {
            windows.push(Window { center: (lo * hi).sqrt(), mean: sum / count as f64, min, max });
        }
    }
    if windows.len() < 3 {
        return None;
    }
    let window_means: Vec<f64> = windows.iter().map(|w| w.mean).collect();
    let increasing = window_means.windows(2).all(|p| p[1] >= p[0]);
    let (head, tail) = (&windows[0], &windows[windows.len() - 1]);
    let growth = if head.max > 0.0 { tail.min / head.max } else { 0.0 };
    let half = &windows[windows.len() / 2..];
    let slope = if half.len() >= 2 && half.iter().all(|w| w.mean > 0.0) {
        let pts: Vec<(f64, f64)> = half.iter().map(|w| (w.center.ln(), w.mean.ln())).collect();
        least_squares_slope(&pts)
    } else {
        None
    };
    let divergent = increasing
        && (growth > rule.growth_factor || slope.is_some_and(|s| s >= rule.min_slope));
    Some(DivergenceEvidence { window_means, increasing, growth, slope, divergent })
}

/// Slope of the least-squares line through `pts`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Growth exponent per decade of a positive statistic observed along a horizon ladder:
/// the least-squares slope of `log10 value` against `log10 horizon`.
pub fn ladder_growth_exponent(horizons: &[usize], values: &[f64]) -> Option<f64> {
    if horizons.len() != values.len() || values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = horizons
        .iter()
        .zip(values)
        .map(|(&n, &v)| ((n as f64).log10(), v.log10()))
        .collect();
    least_squares_slope(&pts)
}
