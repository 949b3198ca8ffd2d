//! Solution of `x(n+1) = H(n+1) + sum_{j=0}^{n} k(n-j) f(x(j))`, `x(0) = xi`,
//! and its inverse map from a path back to the forcing that produces it.
//!
//! Every memory term `S(n)` is produced by an [`Accumulator`]. The reference
//! accumulator sums `j = 0..=n` in ascending order; windowed sums keep that
//! order, so a finite kernel gives bit-identical results in both modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::digest;
use crate::forcing::ForcingSequence;
use crate::scalar::Scalar;
use crate::seqcore::{KernelShape, KernelSpec, NonlinearitySpec, RealSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    /// Direct `O(n)` summation of every memory term.
    Reference,
    /// Geometric recurrence or certified windowed convolution, as the kernel allows.
    #[default]
    Auto,
}

/// The summation scheme actually used for a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolverKind {
    Direct,
    GeometricRecurrence,
    Windowed { last_lag: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub kernel: KernelSpec<T>,
    pub nonlinearity: NonlinearitySpec<T>,
    pub forcing: ForcingSequence<T>,
    pub xi: T,
    pub horizon: usize,
    pub solver: SolverMode,
    pub overflow_limit: T,
}

impl<T: Scalar> SimConfig<T> {
    /// Config with auto solver and the default overflow limit; horizon = forcing length.
    pub fn new(
        kernel: KernelSpec<T>,
        nonlinearity: NonlinearitySpec<T>,
        forcing: ForcingSequence<T>,
        xi: T,
    ) -> Self {
        let horizon = forcing.len();
        Self {
            kernel,
            nonlinearity,
            forcing,
            xi,
            horizon,
            solver: SolverMode::Auto,
            overflow_limit: T::of(T::DEFAULT_OVERFLOW_LIMIT),
        }
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_solver(mut self, solver: SolverMode) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        self.nonlinearity.validate()?;
        if self.horizon == 0 {
            return Err(Error::Argument("horizon must be at least 1".into()));
        }
        if self.forcing.len() < self.horizon {
            return Err(Error::Argument(format!(
                "forcing has {} values but the horizon is {}",
                self.forcing.len(),
                self.horizon
            )));
        }
        if !self.xi.is_finite() {
            return Err(Error::Argument("initial condition must be finite".into()));
        }
        if !(self.overflow_limit > T::zero()) {
            return Err(Error::Argument("overflow limit must be positive".into()));
        }
        Ok(())
    }

    /// Digest of the canonical serialisation of everything that determines the path.
    pub fn fingerprint(&self) -> String {
        digest(&(
            &self.kernel,
            &self.nonlinearity,
            &self.forcing.fingerprint,
            self.xi,
            self.horizon,
            self.solver,
            self.overflow_limit,
        ))
    }
}

/// A realised solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Path<T> {
    /// `x(0..=N)`.
    pub x: RealSeq<T>,
    /// `H(1..=N)` as used.
    pub h: RealSeq<T>,
    /// Memory terms `S(0..N)`; `x(n+1) = H(n+1) + S(n)`.
    pub s: RealSeq<T>,
    pub fingerprint: String,
    pub solver: SolverKind,
    /// Bound on `|S_computed(n) - S_exact(n)|` from a discarded kernel tail, over all `n`.
    pub s_error_bound: T,
}

impl<T: Scalar> Path<T> {
    pub fn horizon(&self) -> usize {
        self.s.len()
    }

    /// The path restricted to `x(0..=n)`.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            x: self.x.prefix(n),
            h: self.h.prefix(n),
            s: match n {
                0 => RealSeq::from_trusted(0, Vec::new()),
                _ => self.s.prefix(n - 1),
            },
            fingerprint: self.fingerprint.clone(),
            solver: self.solver,
            s_error_bound: self.s_error_bound,
        }
    }
}

/// Incremental producer of `S(n)` given `f(x(0..=n))`.
enum Accumulator<T> {
    Direct { k: Vec<T> },
    Windowed { k: Vec<T> },
    Geometric { c: T, rho: T, s: T },
}

impl<T: Scalar> Accumulator<T> {
    /// The accumulator for `mode`, its kind, and the l1 mass of any discarded tail.
    fn new(kernel: &KernelSpec<T>, mode: SolverMode, horizon: usize) -> (Self, SolverKind, T) {
        let direct = || {
            (
                Self::Direct { k: kernel.coefficients(horizon) },
                SolverKind::Direct,
                T::zero(),
            )
        };
        if mode == SolverMode::Reference {
            return direct();
        }
        match &kernel.shape {
            KernelShape::Geometric { c, rho } => (
                Self::Geometric { c: *c, rho: *rho, s: T::zero() },
                SolverKind::GeometricRecurrence,
                T::zero(),
            ),
            KernelShape::Finite { coefficients } => {
                if coefficients.len() >= horizon {
                    return direct();
                }
                (
                    Self::Windowed { k: coefficients.clone() },
                    SolverKind::Windowed { last_lag: coefficients.len().saturating_sub(1) },
                    T::zero(),
                )
            }
            KernelShape::Polynomial { .. } => {
                let last = kernel.window();
                if last.saturating_add(1) >= horizon {
                    return direct();
                }
                (
                    Self::Windowed { k: kernel.coefficients(last + 1) },
                    SolverKind::Windowed { last_lag: last },
                    kernel.tail_mass(last),
                )
            }
        }
    }

    /// `S(n)` where `n = fx.len() - 1`.
    #[inline]
    fn next(&mut self, fx: &[T]) -> T {
        let n = fx.len() - 1;
        match self {
            Self::Direct { k } | Self::Windowed { k } => {
                let first = (n + 1).saturating_sub(k.len());
                let mut acc = T::zero();
                for (j, &fj) in fx.iter().enumerate().skip(first) {
                    acc = acc + k[n - j] * fj;
                }
                acc
            }
            Self::Geometric { c, rho, s } => {
                *s = *rho * *s + *c * fx[n];
                *s
            }
        }
    }
}

fn overflow<T: Scalar>(v: T, limit: T) -> bool {
    !v.is_finite() || v.abs() > limit
}

/// Solve the equation up to `config.horizon`.
pub fn simulate<T: Scalar>(config: &SimConfig<T>) -> Result<Path<T>> {
    config.validate()?;
    let n_max = config.horizon;
    let f = &config.nonlinearity;
    let h = config.forcing.values.values();
    let limit = config.overflow_limit;
    if overflow(config.xi, limit) {
        return Err(Error::Overflow { index: 0, what: "initial condition".into() });
    }
    let (mut acc, solver, tail) = Accumulator::new(&config.kernel, config.solver, n_max);

    let mut x = Vec::with_capacity(n_max + 1);
    let mut fx = Vec::with_capacity(n_max + 1);
    let mut s = Vec::with_capacity(n_max);
    x.push(config.xi);
    fx.push(eval(f, config.xi)?);
    for n in 0..n_max {
        let sn = acc.next(&fx);
        let next = h[n] + sn;
        if overflow(next, limit) {
            return Err(Error::Overflow {
                index: n + 1,
                what: format!("|x({})| exceeds {}", n + 1, limit),
            });
        }
        s.push(sn);
        x.push(next);
        fx.push(eval(f, next)?);
    }

    let s_error_bound = if tail.is_zero() {
        T::zero()
    } else {
        let x_star = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        tail * (f.sublinearity_bound(T::one())? + x_star)
    };
    Ok(Path {
        x: RealSeq::from_trusted(0, x),
        h: RealSeq::from_trusted(1, h[..n_max].to_vec()),
        s: RealSeq::from_trusted(0, s),
        fingerprint: config.fingerprint(),
        solver,
        s_error_bound,
    })
}

#[inline]
fn eval<T: Scalar>(f: &NonlinearitySpec<T>, x: T) -> Result<T> {
    match f.eval_total(x) {
        Some(v) => Ok(v),
        None => f.eval(x),
    }
}

/// `S(n) = sum_{j=0}^{n} k(n-j) f(x(j))` by direct ascending summation.
pub fn volterra_term<T: Scalar>(
    x_prefix: &RealSeq<T>,
    kernel: &KernelSpec<T>,
    f: &NonlinearitySpec<T>,
    n: usize,
) -> Result<T> {
    if x_prefix.start() != 0 {
        return Err(Error::Argument("memory term needs a sequence indexed from 0".into()));
    }
    if n >= x_prefix.len() {
        return Err(Error::Argument(format!(
            "memory term at n = {n} needs x(0..={n}) but only {} values were given",
            x_prefix.len()
        )));
    }
    let mut acc = T::zero();
    for (j, &xj) in x_prefix.values()[..=n].iter().enumerate() {
        acc = acc + kernel.coefficient(n - j) * eval(f, xj)?;
    }
    Ok(acc)
}

/// The forcing `H(n+1) = y(n+1) - S_y(n)` under which the solution started
/// at `xi = y(0)` is `y`.
///
/// `S_y` is accumulated with the same scheme `simulate` uses for `mode`, and
/// each `H(n+1)` is nudged by at most a few ulps so that `H(n+1) + S_y(n)`
/// rounds back to `y(n+1)` exactly whenever such a value exists.
pub fn recover_forcing<T: Scalar>(
    y: &RealSeq<T>,
    kernel: &KernelSpec<T>,
    f: &NonlinearitySpec<T>,
    mode: SolverMode,
) -> Result<RealSeq<T>> {
    if y.start() != 0 {
        return Err(Error::Argument("recover_forcing needs a path indexed from 0".into()));
    }
    if y.len() < 2 {
        return Err(Error::Argument("recover_forcing needs at least y(0) and y(1)".into()));
    }
    let horizon = y.len() - 1;
    let (mut acc, _, _) = Accumulator::new(kernel, mode, horizon);
    let yv = y.values();
    let mut fx = Vec::with_capacity(y.len());
    let mut h = Vec::with_capacity(horizon);
    for n in 0..horizon {
        fx.push(eval(f, yv[n])?);
        let sn = acc.next(&fx);
        if !sn.is_finite() {
            return Err(Error::Overflow { index: n, what: "memory term is not finite".into() });
        }
        let target = yv[n + 1];
        let hn = exact_difference(target, sn);
        if !hn.is_finite() {
            return Err(Error::Overflow { index: n + 1, what: "recovered forcing".into() });
        }
        h.push(hn);
    }
    Ok(RealSeq::from_trusted(1, h))
}

/// A value `h` near `target - s` with `h + s == target` when one exists within
/// a few ulps; otherwise the correctly rounded difference.
fn exact_difference<T: Scalar>(target: T, s: T) -> T {
    let h0 = target - s;
    if h0 + s == target {
        return h0;
    }
    let (mut up, mut down) = (h0, h0);
    for _ in 0..4 {
        up = up.step_up();
        if up + s == target {
            return up;
        }
        down = down.step_down();
        if down + s == target {
            return down;
        }
    }
    h0
}
