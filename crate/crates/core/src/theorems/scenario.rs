use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{ConvexWeightSpec, Regime};
use crate::engine::{simulate, Path, SimConfig, SolverMode};
use crate::error::{Error, Result};
use crate::fingerprint::digest;
use crate::forcing::{generate, ForcingSequence, ForcingSpec};
use crate::seqcore::{KernelSpec, NonlinearityShape, NonlinearitySpec, ScalerSpec};

/// The asymptotic statements a scenario can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Bounded forcing gives a bounded solution.
    BoundedA,
    /// Unbounded forcing gives an unbounded solution.
    BoundedB,
    /// `x*(n) / H*(n) -> 1`.
    Maxratio,
    /// Values at the record times of `|x|` and `|H|` are asymptotically equal.
    ArgmaxCoupling,
    /// `x(n) / H(n) -> 1` for increasing forcing.
    GrowthUp,
    /// `x(n) / H(n) -> 1` for decreasing forcing.
    GrowthDown,
    /// `x(n) / a(n) - Lambda(n) -> 0` when `H(n) / a(n) - Lambda(n) -> 0`.
    ModulatedGrowth,
    SignedflucLambdaLt1,
    SignedflucLambdaGt1,
    SignedflucLambdaEq1,
    Signedfluc2LambdaPos,
    Signedfluc2LambdaZero,
    Signedfluc2LambdaInf,
    /// Negative excursions of `x` when `H*_- / f(H*_+)` has a limit.
    SignedfluctLambda2,
    LimsupRho,
    LimsupSqueeze,
    LimsupSigned,
    ErgodicPhi,
    PthMoment,
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        Self::BoundedA,
        Self::BoundedB,
        Self::Maxratio,
        Self::ArgmaxCoupling,
        Self::GrowthUp,
        Self::GrowthDown,
        Self::ModulatedGrowth,
        Self::SignedflucLambdaLt1,
        Self::SignedflucLambdaGt1,
        Self::SignedflucLambdaEq1,
        Self::Signedfluc2LambdaPos,
        Self::Signedfluc2LambdaZero,
        Self::Signedfluc2LambdaInf,
        Self::SignedfluctLambda2,
        Self::LimsupRho,
        Self::LimsupSqueeze,
        Self::LimsupSigned,
        Self::ErgodicPhi,
        Self::PthMoment,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BoundedA => "bounded-a",
            Self::BoundedB => "bounded-b",
            Self::Maxratio => "maxratio",
            Self::ArgmaxCoupling => "argmax-coupling",
            Self::GrowthUp => "growth-up",
            Self::GrowthDown => "growth-down",
            Self::ModulatedGrowth => "modulated-growth",
            Self::SignedflucLambdaLt1 => "signedfluc-lambda-lt1",
            Self::SignedflucLambdaGt1 => "signedfluc-lambda-gt1",
            Self::SignedflucLambdaEq1 => "signedfluc-lambda-eq1",
            Self::Signedfluc2LambdaPos => "signedfluc2-lambda-pos",
            Self::Signedfluc2LambdaZero => "signedfluc2-lambda-zero",
            Self::Signedfluc2LambdaInf => "signedfluc2-lambda-inf",
            Self::SignedfluctLambda2 => "signedfluct-lambda2",
            Self::LimsupRho => "limsup-rho",
            Self::LimsupSqueeze => "limsup-squeeze",
            Self::LimsupSigned => "limsup-signed",
            Self::ErgodicPhi => "ergodic-phi",
            Self::PthMoment => "pth-moment",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown theorem id `{s}`")))
    }
}

/// Theorem-specific inputs. Which fields are required depends on the theorem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// `eps` of the explicit bound checked by `bounded-a`; defaults to `1 / (2 |k|_1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Declared limit of `H*_- / H*_+`, verified before judging.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Regime>,
    /// Declared limit of `H*_- / f(H*_+)`, verified before judging.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<ScalerSpec<f64>>,
    /// Scaler growing faster than the fluctuations (squeeze check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_scaler: Option<ScalerSpec<f64>>,
    /// Scaler growing slower than the fluctuations (squeeze check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_scaler: Option<ScalerSpec<f64>>,
    /// Expected `limsup log|x(n)| / log n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_exponent: Option<f64>,
    /// Admissible interval for the final limsup estimate of `x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<ConvexWeightSpec<f64>>,
    /// Closed-form long-run average of the weighted forcing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    /// Declared moment regime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergent: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
}

fn one() -> usize {
    1
}

/// A seeded, tolerance-checked experiment for one theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub theorem: TheoremId,
    pub kernel: KernelSpec<f64>,
    pub nonlinearity: NonlinearitySpec<f64>,
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub xi: f64,
    /// Increasing horizon ladder; the path is simulated once to the last one.
    pub horizons: Vec<usize>,
    /// Number of seeds for stochastic forcings; ignored otherwise.
    #[serde(default = "one")]
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub tolerance: f64,
    #[serde(default)]
    pub solver: SolverMode,
    #[serde(default)]
    pub params: ScenarioParams,
}

impl Scenario {
    pub fn max_horizon(&self) -> usize {
        *self.horizons.last().expect("validated scenario has horizons")
    }

    pub fn fingerprint(&self) -> String {
        digest(self)
    }

    pub fn tail_fraction(&self) -> f64 {
        self.params
            .tail_fraction
            .unwrap_or(crate::diagnostics::DEFAULT_TAIL_FRACTION)
    }

    /// Seeds derived from `base_seed` and the scenario name; empty for deterministic forcings.
    pub fn seed_list(&self) -> Vec<u64> {
        if !self.forcing.is_stochastic() {
            return Vec::new();
        }
        (0..self.seeds)
            .map(|i| {
                let hex = digest(&(&self.name, self.base_seed, i));
                u64::from_str_radix(&hex, 16).expect("digest is hex")
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(format!("scenario `{}`: {m}", self.name)));
        if self.name.is_empty() {
            return Err(Error::InvalidSpec("scenario name is empty".into()));
        }
        self.kernel.validate()?;
        self.nonlinearity.validate()?;
        self.forcing.validate()?;
        if self.horizons.is_empty() || self.horizons[0] == 0 {
            return bad("horizons must be nonempty and positive".into());
        }
        if self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return bad("horizons must be strictly increasing".into());
        }
        if self.seeds == 0 {
            return bad("at least one seed is required".into());
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be finite and nonnegative, got {}", self.tolerance));
        }
        if !self.xi.is_finite() {
            return bad("initial condition must be finite".into());
        }
        let tf = self.tail_fraction();
        if !(tf > 0.0 && tf <= 1.0) {
            return bad(format!("tail_fraction must lie in (0, 1], got {tf}"));
        }
        if let ForcingSpec::ConstructedAlternating { alpha, kernel, .. } = &self.forcing {
            if self.xi != 1.0 {
                return bad("the constructed forcing reproduces its target path only from xi = 1".into());
            }
            let same_f = matches!(self.nonlinearity.shape, NonlinearityShape::SignedPower { alpha: a } if a == *alpha);
            if !same_f || kernel != &self.kernel {
                return bad("the constructed forcing must use the scenario's kernel and signed-power exponent".into());
            }
        }
        let p = &self.params;
        let need = |what: &str, ok: bool| if ok { Ok(()) } else { bad(format!("{} needs `{what}`", self.theorem)) };
        match self.theorem {
            TheoremId::ModulatedGrowth => {
                if !matches!(self.forcing, ForcingSpec::PeriodicExponential { .. }) {
                    return bad("modulated-growth needs a periodic-exponential forcing".into());
                }
            }
            TheoremId::LimsupRho | TheoremId::LimsupSigned => need("scaler", p.scaler.is_some())?,
            TheoremId::LimsupSqueeze => {
                need("upper_scaler", p.upper_scaler.is_some())?;
                need("lower_scaler", p.lower_scaler.is_some())?;
            }
            TheoremId::ErgodicPhi | TheoremId::PthMoment => {
                need("weight", p.weight.is_some())?;
                need("divergent", p.divergent.is_some())?;
                if self.horizons.len() < 2 || self.horizons[0] < 10 {
                    return bad("moment checks need at least two horizons, each >= 10".into());
                }
                if let Some(w) = &p.weight {
                    w.validate()?;
                    if self.theorem == TheoremId::PthMoment
                        && !matches!(w.weight, crate::diagnostics::ConvexWeight::Power { .. })
                    {
                        return bad("pth-moment needs a power weight".into());
                    }
                }
            }
            TheoremId::SignedflucLambdaLt1 | TheoremId::SignedflucLambdaGt1 | TheoremId::Signedfluc2LambdaPos => {
                need("lambda", p.lambda.is_some())?;
            }
            TheoremId::SignedfluctLambda2 => need("lambda2", p.lambda2.is_some())?,
            _ => {}
        }
        if let Some(eps) = p.eps {
            if !(eps > 0.0 && eps * self.kernel.l1_norm() < 1.0) {
                return bad(format!("eps must satisfy 0 < eps |k|_1 < 1, got {eps}"));
            }
        }
        for s in [&p.scaler, &p.upper_scaler, &p.lower_scaler].into_iter().flatten() {
            s.validate()?;
        }
        Ok(())
    }

    /// The forcing the check runs on: negated for `growth-down`.
    pub fn forcing_for(&self, seed: u64) -> Result<ForcingSequence<f64>> {
        let h = generate::<f64>(&self.forcing, self.max_horizon(), seed)?;
        Ok(match self.theorem {
            TheoremId::GrowthDown => h.negated(),
            _ => h,
        })
    }

    pub fn simulate_with(&self, forcing: ForcingSequence<f64>) -> Result<Path<f64>> {
        let config = SimConfig::new(self.kernel.clone(), self.nonlinearity.clone(), forcing, self.xi)
            .with_horizon(self.max_horizon())
            .with_solver(self.solver);
        simulate(&config)
    }

    /// Forcing and solution up to the largest horizon for one seed.
    pub fn realize(&self, seed: u64) -> Result<(ForcingSequence<f64>, Path<f64>)> {
        let h = self.forcing_for(seed)?;
        let p = self.simulate_with(h.clone())?;
        Ok((h, p))
    }
}
