use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Continuous sublinear nonlinearity `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum NonlinearityShape<T> {
    /// `f(x) = sgn(x) |x|^alpha`, `alpha` in (0, 1).
    SignedPower { alpha: T },
    /// Saturating ramp `f(x) = clamp(x, -level, level)`.
    Bounded { level: T },
    /// Piecewise-linear interpolation through `(x, f(x))` points with
    /// strictly increasing abscissae. Undefined outside the table range.
    Table { points: Vec<(T, T)> },
}

/// Increasing envelope `phi` on `[0, inf)` with `|f(x)| / phi(|x|) -> 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum EnvelopeShape<T> {
    /// `phi(u) = u^exponent`, exponent in (0, 1].
    Power { exponent: T },
    /// `phi(u) = level * u / (1 + u)`.
    Saturating { level: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Envelope<T> {
    #[serde(flatten)]
    pub shape: EnvelopeShape<T>,
    /// Threshold beyond which `phi(u)/u` is nonincreasing and
    /// `|f(x)| <= ENVELOPE_SLACK * phi(|x|)` is required.
    pub x0: T,
}

/// Allowed overshoot of `|f|` above its envelope beyond `x0`.
pub const ENVELOPE_SLACK: f64 = 1.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct NonlinearitySpec<T> {
    #[serde(flatten)]
    pub shape: NonlinearityShape<T>,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Envelope<T>>,
}

impl<T: Scalar> NonlinearitySpec<T> {
    pub fn new(shape: NonlinearityShape<T>, envelope: Option<Envelope<T>>) -> Result<Self> {
        let f = Self { shape, envelope };
        f.validate()?;
        Ok(f)
    }

    pub fn signed_power(alpha: T) -> Result<Self> {
        Self::new(NonlinearityShape::SignedPower { alpha }, None)
    }

    pub fn bounded(level: T) -> Result<Self> {
        Self::new(NonlinearityShape::Bounded { level }, None)
    }

    pub fn table(points: Vec<(T, T)>) -> Result<Self> {
        Self::new(NonlinearityShape::Table { points }, None)
    }

    /// Attach the natural envelope of a signed power, `phi(u) = u^alpha`, with `x0 = 1`.
    pub fn with_power_envelope(self) -> Result<Self> {
        match self.shape {
            NonlinearityShape::SignedPower { alpha } => Self::new(
                self.shape,
                Some(Envelope {
                    shape: EnvelopeShape::Power { exponent: alpha },
                    x0: T::one(),
                }),
            ),
            _ => Err(Error::InvalidSpec(
                "the power envelope is only defined for signed-power nonlinearities".into(),
            )),
        }
    }

    pub fn with_envelope(self, envelope: Envelope<T>) -> Result<Self> {
        Self::new(self.shape, Some(envelope))
    }

    /// The same nonlinearity in another scalar precision.
    pub fn cast<U: Scalar>(&self) -> NonlinearitySpec<U> {
        let c = |v: T| U::of(v.as_f64());
        let shape = match &self.shape {
            NonlinearityShape::SignedPower { alpha } => NonlinearityShape::SignedPower { alpha: c(*alpha) },
            NonlinearityShape::Bounded { level } => NonlinearityShape::Bounded { level: c(*level) },
            NonlinearityShape::Table { points } => NonlinearityShape::Table {
                points: points.iter().map(|&(x, y)| (c(x), c(y))).collect(),
            },
        };
        let envelope = self.envelope.as_ref().map(|e| Envelope {
            shape: match e.shape {
                EnvelopeShape::Power { exponent } => EnvelopeShape::Power { exponent: c(exponent) },
                EnvelopeShape::Saturating { level } => EnvelopeShape::Saturating { level: c(level) },
            },
            x0: c(e.x0),
        });
        NonlinearitySpec { shape, envelope }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            NonlinearityShape::SignedPower { alpha } => {
                if !(*alpha > T::zero() && *alpha < T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "signed-power exponent must lie in (0, 1), got {alpha}"
                    )));
                }
            }
            NonlinearityShape::Bounded { level } => {
                if !(*level >= T::zero()) || !level.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "bounded nonlinearity level must be finite and >= 0, got {level}"
                    )));
                }
            }
            NonlinearityShape::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidSpec(
                        "table nonlinearity needs at least two points".into(),
                    ));
                }
                if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::InvalidSpec("table entries must be finite".into()));
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::InvalidSpec(
                        "table abscissae must be strictly increasing".into(),
                    ));
                }
            }
        }
        if let Some(env) = &self.envelope {
            self.validate_envelope(env)?;
        }
        Ok(())
    }

    fn validate_envelope(&self, env: &Envelope<T>) -> Result<()> {
        match env.shape {
            EnvelopeShape::Power { exponent } => {
                if !(exponent > T::zero() && exponent <= T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "power envelope exponent must lie in (0, 1], got {exponent}"
                    )));
                }
            }
            EnvelopeShape::Saturating { level } => {
                if !(level > T::zero()) || !level.is_finite() {
                    return Err(Error::InvalidSpec(
                        "saturating envelope level must be positive".into(),
                    ));
                }
            }
        }
        if !(env.x0 >= T::zero()) || !env.x0.is_finite() {
            return Err(Error::InvalidSpec("envelope x0 must be finite and >= 0".into()));
        }
        // |f(x)| <= 1.01 phi(|x|) on a log grid beyond x0, both signs
        let start = env.x0.as_f64().max(1e-12);
        let slack = T::of(ENVELOPE_SLACK);
        for i in 0..=240 {
            let u = T::of(start * 10f64.powf(i as f64 / 20.0));
            if !u.is_finite() {
                break;
            }
            let phi = env.eval(u);
            for x in [u, -u] {
                let fx = match self.eval(x) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if fx.abs() > slack * phi {
                    return Err(Error::InvalidSpec(format!(
                        "|f({x})| = {} exceeds {ENVELOPE_SLACK} * phi({u}) = {}",
                        fx.abs(),
                        slack * phi
                    )));
                }
            }
        }
        Ok(())
    }

    /// `f(x)`.
    pub fn eval(&self, x: T) -> Result<T> {
        match &self.shape {
            NonlinearityShape::SignedPower { alpha } => Ok(signed_power(x, *alpha)),
            NonlinearityShape::Bounded { level } => Ok(x.max(-*level).min(*level)),
            NonlinearityShape::Table { points } => interpolate(points, x),
        }
    }

    /// Closed-form `f` for the variants defined on all of R; used by hot loops.
    #[inline]
    pub(crate) fn eval_total(&self, x: T) -> Option<T> {
        match &self.shape {
            NonlinearityShape::SignedPower { alpha } => Some(signed_power(x, *alpha)),
            NonlinearityShape::Bounded { level } => Some(x.max(-*level).min(*level)),
            NonlinearityShape::Table { .. } => None,
        }
    }

    /// Exponent of the signed power, if that is the variant.
    pub fn power_exponent(&self) -> Option<T> {
        match self.shape {
            NonlinearityShape::SignedPower { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// `F(eps)` with `|f(x)| <= F(eps) + eps |x|` for every `x` where `f` is defined.
    pub fn sublinearity_bound(&self, eps: T) -> Result<T> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::Argument(format!(
                "sublinearity bound needs eps > 0, got {eps}"
            )));
        }
        match &self.shape {
            NonlinearityShape::SignedPower { alpha } => {
                // sup_u (u^a - eps u) at u = (a/eps)^(1/(1-a)): (1-a) (a/eps)^(a/(1-a))
                let a = *alpha;
                let one = T::one();
                Ok((one - a) * (a / eps).powf(a / (one - a)))
            }
            NonlinearityShape::Bounded { level } => Ok(*level),
            NonlinearityShape::Table { points } => {
                // |f| - eps|x| is piecewise linear apart from kinks at zero
                // crossings (minima) and x = 0 (a maximum of -eps|x|), so its
                // supremum is attained at a breakpoint or at 0.
                let mut best = T::zero();
                let mut consider = |x: T| {
                    if let Ok(v) = interpolate(points, x) {
                        best = best.max(v.abs() - eps * x.abs());
                    }
                };
                for &(x, _) in points {
                    consider(x);
                }
                consider(T::zero());
                Ok(best * T::of(1.01))
            }
        }
    }
}

impl<T: Scalar> Envelope<T> {
    pub fn eval(&self, u: T) -> T {
        match self.shape {
            EnvelopeShape::Power { exponent } => u.abs().powf(exponent),
            EnvelopeShape::Saturating { level } => level * u.abs() / (T::one() + u.abs()),
        }
    }
}

#[inline]
fn signed_power<T: Scalar>(x: T, alpha: T) -> T {
    if x.is_zero() {
        x
    } else {
        x.signum() * x.abs().powf(alpha)
    }
}

fn interpolate<T: Scalar>(points: &[(T, T)], x: T) -> Result<T> {
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain(format!(
            "table nonlinearity queried at {x}, outside [{lo}, {hi}]"
        )));
    }
    let i = points.partition_point(|p| p.0 <= x);
    if i == points.len() {
        return Ok(points[points.len() - 1].1);
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    let t = (x - x0) / (x1 - x0);
    Ok(y0 + t * (y1 - y0))
}
