use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest window a kernel may be materialised into by [`KernelSpec::truncated`].
pub const MAX_MATERIALISED_WINDOW: usize = 50_000_000;

/// Shape of a summable convolution kernel `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum KernelShape<T> {
    /// `k(j) = coefficients[j]`, zero beyond the list. An empty list is the null kernel.
    Finite { coefficients: Vec<T> },
    /// `k(j) = c * rho^j` with `|rho| < 1`.
    Geometric { c: T, rho: T },
    /// `k(j) = c * (j + 1)^(-beta)` with `beta > 1`.
    Polynomial { c: T, beta: T },
}

/// A summable kernel with its certified truncation tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct KernelSpec<T> {
    #[serde(flatten)]
    pub shape: KernelShape<T>,
    /// Certified l1 tolerance used whenever the kernel tail is discarded.
    #[serde(default = "default_trunc_tol")]
    pub trunc_tol: T,
}

fn default_trunc_tol<T: Scalar>() -> T {
    T::of(T::DEFAULT_TRUNC_TOL)
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(shape: KernelShape<T>, trunc_tol: T) -> Result<Self> {
        let k = Self { shape, trunc_tol };
        k.validate()?;
        Ok(k)
    }

    pub fn null() -> Self {
        Self::finite(Vec::new()).expect("empty kernel is valid")
    }

    pub fn finite(coefficients: Vec<T>) -> Result<Self> {
        Self::new(KernelShape::Finite { coefficients }, default_trunc_tol())
    }

    pub fn geometric(c: T, rho: T) -> Result<Self> {
        Self::new(KernelShape::Geometric { c, rho }, default_trunc_tol())
    }

    pub fn polynomial(c: T, beta: T) -> Result<Self> {
        Self::new(KernelShape::Polynomial { c, beta }, default_trunc_tol())
    }

    pub fn with_trunc_tol(mut self, tol: T) -> Result<Self> {
        self.trunc_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trunc_tol >= T::zero()) || !self.trunc_tol.is_finite() {
            return Err(Error::InvalidSpec(
                "kernel trunc_tol must be a finite nonnegative number".into(),
            ));
        }
        match &self.shape {
            KernelShape::Finite { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSpec(
                        "kernel coefficients must be finite".into(),
                    ));
                }
            }
            KernelShape::Geometric { c, rho } => {
                if !c.is_finite() || !(rho.abs() < T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "geometric kernel requires |rho| < 1 and finite c (got c={c}, rho={rho})"
                    )));
                }
            }
            KernelShape::Polynomial { c, beta } => {
                if !c.is_finite() || !(*beta > T::one()) || !beta.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "polynomial kernel requires beta > 1 and finite c (got c={c}, beta={beta})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same kernel in another scalar precision.
    pub fn cast<U: Scalar>(&self) -> KernelSpec<U> {
        let c = |v: &T| U::of(v.as_f64());
        let shape = match &self.shape {
            KernelShape::Finite { coefficients } => KernelShape::Finite {
                coefficients: coefficients.iter().map(c).collect(),
            },
            KernelShape::Geometric { c: k, rho } => KernelShape::Geometric { c: c(k), rho: c(rho) },
            KernelShape::Polynomial { c: k, beta } => {
                KernelShape::Polynomial { c: c(k), beta: c(beta) }
            }
        };
        KernelSpec { shape, trunc_tol: c(&self.trunc_tol) }
    }

    pub fn is_null(&self) -> bool {
        match &self.shape {
            KernelShape::Finite { coefficients } => coefficients.iter().all(|c| c.is_zero()),
            KernelShape::Geometric { c, .. } | KernelShape::Polynomial { c, .. } => c.is_zero(),
        }
    }

    /// `k(j)`.
    pub fn coefficient(&self, j: usize) -> T {
        match &self.shape {
            KernelShape::Finite { coefficients } => {
                coefficients.get(j).copied().unwrap_or_else(T::zero)
            }
            KernelShape::Geometric { c, rho } => *c * powi_usize(*rho, j),
            KernelShape::Polynomial { c, beta } => {
                *c * T::of((j + 1) as f64).powf(-*beta)
            }
        }
    }

    /// `k(0), ..., k(len - 1)`.
    pub fn coefficients(&self, len: usize) -> Vec<T> {
        match &self.shape {
            KernelShape::Geometric { c, rho } => {
                let mut out = Vec::with_capacity(len);
                let mut p = T::one();
                for _ in 0..len {
                    out.push(*c * p);
                    p = p * *rho;
                }
                out
            }
            _ => (0..len).map(|j| self.coefficient(j)).collect(),
        }
    }

    /// `|k|_1 = sum_j |k(j)|`: exact for finite and geometric kernels, within
    /// `trunc_tol` for polynomial kernels.
    pub fn l1_norm(&self) -> T {
        match &self.shape {
            KernelShape::Finite { coefficients } => {
                coefficients.iter().fold(T::zero(), |acc, c| acc + c.abs())
            }
            KernelShape::Geometric { c, rho } => c.abs() / (T::one() - rho.abs()),
            KernelShape::Polynomial { c, beta } => {
                let tol = self.trunc_tol.as_f64() / c.abs().as_f64().max(f64::MIN_POSITIVE);
                T::of(c.abs().as_f64() * zeta(beta.as_f64(), tol))
            }
        }
    }

    /// `sum_j k(2j)`, the even-lag mass of the kernel.
    pub fn even_sum(&self) -> T {
        match &self.shape {
            KernelShape::Finite { coefficients } => coefficients
                .iter()
                .step_by(2)
                .fold(T::zero(), |acc, &c| acc + c),
            KernelShape::Geometric { c, rho } => *c / (T::one() - *rho * *rho),
            KernelShape::Polynomial { c, beta } => {
                let b = beta.as_f64();
                let tol = self.trunc_tol.as_f64() / c.abs().as_f64().max(f64::MIN_POSITIVE);
                // sum over odd m of m^-beta = (1 - 2^-beta) * zeta(beta)
                T::of(c.as_f64() * (1.0 - 2f64.powf(-b)) * zeta(b, tol))
            }
        }
    }

    /// Certified upper bound on `sum_{j > last} |k(j)|`.
    pub fn tail_mass(&self, last: usize) -> T {
        match &self.shape {
            KernelShape::Finite { coefficients } => coefficients
                .iter()
                .skip(last.saturating_add(1))
                .fold(T::zero(), |acc, c| acc + c.abs()),
            KernelShape::Geometric { c, rho } => {
                c.abs() * powi_usize(rho.abs(), last.saturating_add(1)) / (T::one() - rho.abs())
            }
            KernelShape::Polynomial { c, beta } => {
                // sum_{j > L} (j+1)^-beta <= (L+1)^(1-beta) / (beta-1)
                let l1 = T::of(last as f64 + 1.0);
                c.abs() * l1.powf(T::one() - *beta) / (*beta - T::one())
            }
        }
    }

    /// Last lag `L` to keep so that the discarded tail `sum_{j > L} |k(j)|`
    /// is at most `trunc_tol`. Saturates at `usize::MAX` when the bound
    /// would need an astronomically long window.
    pub fn window(&self) -> usize {
        let tol = self.trunc_tol.as_f64();
        match &self.shape {
            KernelShape::Finite { coefficients } => {
                // drop trailing coefficients whose total mass fits in the tolerance
                let mut tail = 0.0;
                let mut last = coefficients.len();
                while last > 0 {
                    let next = tail + coefficients[last - 1].abs().as_f64();
                    if next > tol {
                        break;
                    }
                    tail = next;
                    last -= 1;
                }
                last.saturating_sub(1)
            }
            KernelShape::Geometric { c, rho } => {
                let (c, r) = (c.abs().as_f64(), rho.abs().as_f64());
                if c == 0.0 || r == 0.0 {
                    return 0;
                }
                let target = tol * (1.0 - r) / c;
                if target >= 1.0 {
                    return 0;
                }
                if target <= 0.0 {
                    return usize::MAX;
                }
                let needed = (target.ln() / r.ln()).ceil();
                to_window(needed - 1.0)
            }
            KernelShape::Polynomial { c, beta } => {
                let (c, b) = (c.abs().as_f64(), beta.as_f64());
                if c == 0.0 {
                    return 0;
                }
                if tol <= 0.0 {
                    return usize::MAX;
                }
                let needed = (tol * (b - 1.0) / c).powf(1.0 / (1.0 - b)).ceil();
                to_window(needed - 1.0)
            }
        }
    }

    /// Finite kernel holding lags `0..=window()`.
    pub fn truncated(&self) -> Result<Self> {
        let last = self.window();
        if last >= MAX_MATERIALISED_WINDOW {
            return Err(Error::Argument(format!(
                "truncation window {last} exceeds the materialisation limit {MAX_MATERIALISED_WINDOW}"
            )));
        }
        Self::new(
            KernelShape::Finite {
                coefficients: self.coefficients(last + 1),
            },
            self.trunc_tol,
        )
    }
}

fn to_window(v: f64) -> usize {
    if v <= 0.0 {
        0
    } else if v >= usize::MAX as f64 {
        usize::MAX
    } else {
        v as usize
    }
}

fn powi_usize<T: Scalar>(base: T, exp: usize) -> T {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(T::of(exp as f64)),
    }
}

/// `sum_{m >= 1} m^-beta` for `beta > 1`, accurate to `tol` (absolute).
///
/// Direct partial sum up to `M - 1` plus an Euler-Maclaurin tail with three
/// Bernoulli corrections; `M` is doubled until twice the first omitted
/// correction is below `tol`.
pub(crate) fn zeta(beta: f64, tol: f64) -> f64 {
    let rising = |k: usize| (0..k).fold(1.0, |acc, i| acc * (beta + i as f64));
    let mut m: f64 = 16.0;
    let tol = tol.max(f64::EPSILON);
    while 2.0 * rising(7) / 1_209_600.0 * m.powf(-beta - 7.0) > tol && m < 1_048_576.0 {
        m *= 2.0;
    }
    let tail = m.powf(1.0 - beta) / (beta - 1.0)
        + 0.5 * m.powf(-beta)
        + beta / 12.0 * m.powf(-beta - 1.0)
        - rising(3) / 720.0 * m.powf(-beta - 3.0)
        + rising(5) / 30_240.0 * m.powf(-beta - 5.0);
    let head: f64 = (1..m as usize)
        .rev()
        .map(|i| (i as f64).powf(-beta))
        .sum();
    head + tail
}
