//! Forcing sequences `H(1..=N)`: deterministic growth and fluctuation
//! patterns, seeded iid noise, and the alternating counter-example built by
//! inverting the equation.

mod rng;

use serde::{Deserialize, Serialize};

pub use rng::CounterRng;

use crate::engine::{recover_forcing, SolverMode};
use crate::error::{Error, Result};
use crate::fingerprint::digest;
use crate::scalar::Scalar;
use crate::seqcore::{KernelSpec, NonlinearitySpec, RealSeq};

/// Recipe for a forcing sequence. Parameters are held in double precision;
/// values are realised in any [`Scalar`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ForcingSpec {
    /// `H(n) = n^mu`.
    MonotonePower { mu: f64 },
    /// `H(n) = exp(a n) * pi[n mod len(pi)]`.
    PeriodicExponential { a: f64, pi: Vec<f64> },
    /// iid `N(0, sigma^2)`.
    GaussianIid { sigma: f64 },
    /// iid symmetric, `P(|H| > x) = x^-alpha` for `x >= 1`.
    HeavytailIid { alpha: f64 },
    /// `H(n) = amplitude * sin(n)`.
    BoundedOscillation { amplitude: f64 },
    /// `H(n) = n^mu_plus` for even `n`, `-ratio * n^mu_minus` for odd `n`.
    AlternatingPower { mu_plus: f64, mu_minus: f64, ratio: f64 },
    /// `H` recovered from `y(n) = (n+1)^mu_plus` (even `n`), `-(n+1)^mu_minus`
    /// (odd `n`) so that the solution with `xi = y(0) = 1` is exactly `y`.
    ConstructedAlternating {
        mu_plus: f64,
        mu_minus: f64,
        alpha: f64,
        kernel: KernelSpec<f64>,
    },
}

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            Self::MonotonePower { mu } if !(*mu > 0.0 && mu.is_finite()) => {
                bad(format!("monotone-power needs mu > 0, got {mu}"))
            }
            Self::PeriodicExponential { a, .. } if !(*a > 0.0 && a.is_finite()) => {
                bad(format!("periodic-exponential needs a > 0, got {a}"))
            }
            Self::PeriodicExponential { pi, .. } => {
                let lo = pi.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if pi.iter().any(|p| !(*p > 0.0 && p.is_finite())) || !(lo < hi) {
                    bad("periodic-exponential needs a nonconstant pattern of positive values".into())
                } else {
                    Ok(())
                }
            }
            Self::GaussianIid { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => {
                bad(format!("gaussian-iid needs sigma > 0, got {sigma}"))
            }
            Self::HeavytailIid { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                bad(format!("heavytail-iid needs alpha > 0, got {alpha}"))
            }
            Self::BoundedOscillation { amplitude } if !amplitude.is_finite() => {
                bad("bounded-oscillation amplitude must be finite".into())
            }
            Self::AlternatingPower { mu_plus, mu_minus, ratio } => {
                if !(*mu_plus >= 0.0 && *mu_minus >= 0.0 && *ratio > 0.0)
                    || !(mu_plus.is_finite() && mu_minus.is_finite() && ratio.is_finite())
                {
                    bad("alternating-power needs mu_plus, mu_minus >= 0 and ratio > 0".into())
                } else {
                    Ok(())
                }
            }
            Self::ConstructedAlternating { mu_plus, mu_minus, alpha, kernel } => {
                if !(*mu_plus > *mu_minus && *mu_minus >= 0.0) || !mu_plus.is_finite() {
                    return bad(format!(
                        "constructed-alternating needs mu_plus > mu_minus >= 0 (got {mu_plus}, {mu_minus})"
                    ));
                }
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return bad(format!("constructed-alternating needs alpha in (0, 1), got {alpha}"));
                }
                kernel.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::GaussianIid { .. } | Self::HeavytailIid { .. })
    }

    /// Fingerprint of the recipe and (for stochastic variants) the seed.
    pub fn fingerprint(&self, seed: Option<u64>) -> String {
        digest(&(self, seed.filter(|_| self.is_stochastic())))
    }

    /// The exact target path `y(0..=n)` of the constructed variant.
    pub fn constructed_path<T: Scalar>(&self, n: usize) -> Option<RealSeq<T>> {
        match self {
            Self::ConstructedAlternating { mu_plus, mu_minus, .. } => {
                let (mp, mm) = (T::of(*mu_plus), T::of(*mu_minus));
                let y = (0..=n)
                    .map(|i| {
                        let base = T::of((i + 1) as f64);
                        if i % 2 == 0 {
                            base.powf(mp)
                        } else {
                            -base.powf(mm)
                        }
                    })
                    .collect();
                RealSeq::x_like(y).ok()
            }
            _ => None,
        }
    }
}

/// A realised forcing sequence with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct ForcingSequence<T> {
    pub fingerprint: String,
    pub seed: Option<u64>,
    pub values: RealSeq<T>,
}

impl<T: Scalar> ForcingSequence<T> {
    /// Wrap externally supplied values `H(1), H(2), ...` (e.g. an imported replay file).
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        let values = RealSeq::h_like(values)?;
        let fingerprint = digest(&("imported", values.values()));
        Ok(Self { fingerprint, seed: None, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `-H`, with a derived fingerprint.
    pub fn negated(&self) -> Self {
        Self {
            fingerprint: digest(&("negated", &self.fingerprint)),
            seed: self.seed,
            values: self.values.negated(),
        }
    }
}

/// Realise `H(1..=n)` from `spec`. `seed` is used by the stochastic variants only.
pub fn generate<T: Scalar>(spec: &ForcingSpec, n: usize, seed: u64) -> Result<ForcingSequence<T>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Argument("forcing length must be positive".into()));
    }
    let limit = T::DEFAULT_OVERFLOW_LIMIT;
    let values: Vec<T> = match spec {
        ForcingSpec::MonotonePower { mu } => {
            (1..=n).map(|i| T::of(i as f64).powf(T::of(*mu))).collect()
        }
        ForcingSpec::PeriodicExponential { a, pi } => {
            let pi_max = pi.iter().copied().fold(f64::MIN, f64::max);
            // first index where e^{a n} max(pi) leaves the representable range
            let last_ok = ((limit / pi_max).ln() / a).floor();
            if (n as f64) > last_ok {
                return Err(Error::Overflow {
                    index: (last_ok.max(0.0) as usize) + 1,
                    what: "periodic-exponential forcing exceeds the overflow limit".into(),
                });
            }
            (1..=n)
                .map(|i| T::of(*a * i as f64).exp() * T::of(pi[i % pi.len()]))
                .collect()
        }
        ForcingSpec::GaussianIid { sigma } => CounterRng::new(seed)
            .words(n)
            .map(|w| T::of(sigma * rng::standard_normal(w)))
            .collect(),
        ForcingSpec::HeavytailIid { alpha } => CounterRng::new(seed)
            .words(n)
            .map(|w| T::of(rng::symmetric_pareto(w, *alpha)))
            .collect(),
        ForcingSpec::BoundedOscillation { amplitude } => {
            (1..=n).map(|i| T::of(amplitude * (i as f64).sin())).collect()
        }
        ForcingSpec::AlternatingPower { mu_plus, mu_minus, ratio } => (1..=n)
            .map(|i| {
                let b = T::of(i as f64);
                if i % 2 == 0 {
                    b.powf(T::of(*mu_plus))
                } else {
                    -T::of(*ratio) * b.powf(T::of(*mu_minus))
                }
            })
            .collect(),
        ForcingSpec::ConstructedAlternating { alpha, kernel, .. } => {
            let y = spec.constructed_path::<T>(n).expect("constructed variant");
            let f = NonlinearitySpec::signed_power(T::of(*alpha))?;
            return Ok(ForcingSequence {
                fingerprint: spec.fingerprint(None),
                seed: None,
                values: recover_forcing(&y, &kernel.cast::<T>(), &f, SolverMode::Auto)?,
            });
        }
    };
    if let Some(pos) = values
        .iter()
        .position(|v| !v.is_finite() || v.abs() > T::of(limit))
    {
        return Err(Error::Overflow {
            index: pos + 1,
            what: "forcing value exceeds the overflow limit".into(),
        });
    }
    Ok(ForcingSequence {
        fingerprint: spec.fingerprint(Some(seed)),
        seed: spec.is_stochastic().then_some(seed),
        values: RealSeq::from_trusted(1, values),
    })
}

/// Asymptotic regime of the constructed alternating forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructedRegime {
    /// `mu_plus * alpha < mu_minus`: negative side of `H` follows `y`.
    NegativeSideFollowsY,
    /// `mu_minus < alpha * mu_plus`: negative side of `H` is driven by the memory term.
    NegativeSideFromMemory,
    /// `mu_minus = alpha * mu_plus`: not covered.
    Boundary,
}

/// Predicted growth of `H*_+` and `H*_-` for the constructed forcing:
/// `H*_+(n) ~ n^plus_exponent`, `H*_-(n) ~ minus_constant * n^minus_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructedPrediction {
    pub regime: ConstructedRegime,
    pub plus_exponent: Option<f64>,
    pub minus_exponent: Option<f64>,
    pub minus_constant: Option<f64>,
}

pub fn constructed_asymptotics(spec: &ForcingSpec) -> Result<ConstructedPrediction> {
    spec.validate()?;
    let ForcingSpec::ConstructedAlternating { mu_plus, mu_minus, alpha, kernel } = spec else {
        return Err(Error::Argument(
            "asymptotic prediction needs a constructed-alternating forcing".into(),
        ));
    };
    let pivot = alpha * mu_plus;
    let scale = mu_minus.abs().max(pivot.abs()).max(1.0);
    let prediction = if (mu_minus - pivot).abs() <= 1e-12 * scale {
        ConstructedPrediction {
            regime: ConstructedRegime::Boundary,
            plus_exponent: None,
            minus_exponent: None,
            minus_constant: None,
        }
    } else if pivot < *mu_minus {
        ConstructedPrediction {
            regime: ConstructedRegime::NegativeSideFollowsY,
            plus_exponent: Some(*mu_plus),
            minus_exponent: Some(*mu_minus),
            minus_constant: Some(1.0),
        }
    } else {
        ConstructedPrediction {
            regime: ConstructedRegime::NegativeSideFromMemory,
            plus_exponent: Some(*mu_plus),
            minus_exponent: Some(pivot),
            minus_constant: Some(kernel.even_sum()),
        }
    };
    Ok(prediction)
}
