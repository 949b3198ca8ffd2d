use serde::{Deserialize, Serialize};

use super::maxima::running_max_abs;
use crate::engine::Path;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seqcore::{KernelSpec, NonlinearitySpec};

/// Relative rounding slack granted to every pathwise inequality.
pub const PATHWISE_REL_SLACK: f64 = 1e-12;

/// The a-priori estimates every solution satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// `|S(n)| <= |k|_1 F(eps) + eps |k|_1 x*(n)`
    MemoryBound,
    /// `x*(n) <= (|x(0)| + |k|_1 F(eps) + H*(n)) / (1 - eps |k|_1)` for `n >= 1`, when `eps |k|_1 < 1`
    SolutionMaxBound,
    /// `|H(n)| <= (1 + eps |k|_1) x*(n) + |k|_1 F(eps)` for `n >= 1`
    ForcingBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwiseCheck {
    pub inequality: Inequality,
    pub eps: f64,
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<usize>,
    /// Largest `lhs / rhs` seen.
    pub worst_ratio: f64,
}

impl PathwiseCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    violations: usize,
    first: Option<usize>,
    worst: f64,
}

impl Tally {
    fn see(&mut self, n: usize, lhs: f64, rhs: f64, slack: f64) {
        self.checked += 1;
        if rhs > 0.0 {
            self.worst = self.worst.max(lhs / rhs);
        }
        if lhs > rhs + slack {
            self.violations += 1;
            self.first.get_or_insert(n);
        }
    }

    fn finish(self, inequality: Inequality, eps: f64) -> PathwiseCheck {
        PathwiseCheck {
            inequality,
            eps,
            checked: self.checked,
            violations: self.violations,
            first_violation: self.first,
            worst_ratio: self.worst,
        }
    }
}

/// Evaluate the three estimates at every index of `path` for one `eps`.
/// The solution-maximum bound is skipped (absent from the result) when `eps |k|_1 >= 1`.
pub fn check_pathwise<T: Scalar>(
    path: &Path<T>,
    kernel: &KernelSpec<T>,
    f: &NonlinearitySpec<T>,
    eps: f64,
) -> Result<Vec<PathwiseCheck>> {
    if !(eps > 0.0) {
        return Err(Error::Argument(format!("eps must be positive, got {eps}")));
    }
    let l1 = kernel.l1_norm().as_f64();
    let big_f = f.sublinearity_bound(T::of(eps))?.as_f64();
    let err = path.s_error_bound.as_f64();
    let x_star = running_max_abs(&path.x)?;
    let xs: Vec<f64> = x_star.values().values().iter().map(|v| v.as_f64()).collect();
    let x0 = path.x.values()[0].as_f64().abs();

    let mut memory = Tally::default();
    for (n, s) in path.s.iter() {
        let rhs = l1 * big_f + eps * l1 * xs[n];
        memory.see(n, s.as_f64().abs(), rhs, PATHWISE_REL_SLACK * rhs + err);
    }

    let mut forcing = Tally::default();
    let mut solution = Tally::default();
    let contraction = 1.0 - eps * l1;
    let mut h_star = 0.0f64;
    for (n, h) in path.h.iter() {
        let h = h.as_f64().abs();
        h_star = h_star.max(h);
        let rhs = (1.0 + eps * l1) * xs[n] + l1 * big_f;
        forcing.see(n, h, rhs, PATHWISE_REL_SLACK * rhs + err);
        if contraction > 0.0 {
            let rhs = (x0 + l1 * big_f + h_star) / contraction;
            solution.see(n, xs[n], rhs, PATHWISE_REL_SLACK * rhs + err / contraction);
        }
    }

    let mut out = vec![memory.finish(Inequality::MemoryBound, eps)];
    if contraction > 0.0 {
        out.push(solution.finish(Inequality::SolutionMaxBound, eps));
    }
    out.push(forcing.finish(Inequality::ForcingBound, eps));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, SimConfig};
    use crate::forcing::ForcingSequence;

    #[test]
    fn holds_on_a_simple_path() {
        let k = KernelSpec::geometric(1.0, 0.5).unwrap();
        let f = NonlinearitySpec::signed_power(0.5).unwrap();
        let h: Vec<f64> = (1..=500).map(|n| (n as f64).sin() * 3.0).collect();
        let cfg = SimConfig::new(k.clone(), f.clone(), ForcingSequence::from_values(h).unwrap(), 2.0);
        let p = simulate(&cfg).unwrap();
        for eps in [0.5, 0.1, 0.01] {
            let checks = check_pathwise(&p, &k, &f, eps).unwrap();
            assert_eq!(checks.len(), if eps < 0.5 { 3 } else { 2 });
            for c in checks {
                assert!(c.holds(), "{c:?}");
                assert!(c.worst_ratio <= 1.0);
            }
        }
    }

    #[test]
    fn detects_a_forged_memory_term() {
        let k = KernelSpec::finite(vec![0.5]).unwrap();
        let f = NonlinearitySpec::signed_power(0.5).unwrap();
        let cfg = SimConfig::new(k.clone(), f.clone(), ForcingSequence::from_values(vec![1.0; 4]).unwrap(), 0.0);
        let mut p = simulate(&cfg).unwrap();
        let mut s = p.s.values().to_vec();
        s[2] = 1e6;
        p.s = crate::seqcore::RealSeq::x_like(s).unwrap();
        let c = &check_pathwise(&p, &k, &f, 0.1).unwrap()[0];
        assert_eq!((c.violations, c.first_violation), (1, Some(2)));
    }
}
