use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::run_check;
use super::judge::{TheoremCheck, Verdict};
use super::scenario::{Scenario, ScenarioParams, TheoremId};
use crate::diagnostics::{ConvexWeightSpec, Regime};
use crate::engine::SolverMode;
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::seqcore::{KernelSpec, NonlinearitySpec, ScalerSpec};

/// Checks of a suite run, in scenario order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<TheoremCheck>,
}

impl SuiteReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == verdict).count()
    }

    pub fn all_passed(&self) -> bool {
        self.count(Verdict::Pass) == self.checks.len()
    }

    pub fn any_failed(&self) -> bool {
        self.count(Verdict::Fail) > 0
    }
}

/// Validate every scenario, then run them in parallel. A scenario whose run
/// errors (e.g. an unexpected overflow) is reported as a failed check.
pub fn run_suite(scenarios: &[Scenario]) -> Result<SuiteReport> {
    let mut names = BTreeSet::new();
    for s in scenarios {
        s.validate()?;
        if !names.insert(s.name.as_str()) {
            return Err(Error::InvalidSpec(format!("duplicate scenario name `{}`", s.name)));
        }
    }
    let checks = scenarios
        .par_iter()
        .map(|s| run_check(s).unwrap_or_else(|e| errored(s, e)))
        .collect();
    Ok(SuiteReport { checks })
}

fn errored(s: &Scenario, e: Error) -> TheoremCheck {
    TheoremCheck {
        scenario: s.name.clone(),
        theorem: s.theorem,
        fingerprint: s.fingerprint(),
        seeds: s.seed_list(),
        horizons: s.horizons.clone(),
        tolerance: s.tolerance,
        statistics: Vec::new(),
        summary: Default::default(),
        preconditions: Vec::new(),
        criteria: Vec::new(),
        verdict: Verdict::Fail,
        detail: format!("run failed: {e}"),
    }
}

fn geometric(c: f64, rho: f64) -> KernelSpec<f64> {
    KernelSpec::geometric(c, rho).expect("valid kernel")
}

fn power(alpha: f64) -> NonlinearitySpec<f64> {
    NonlinearitySpec::signed_power(alpha).expect("valid nonlinearity")
}

fn base(
    name: &str,
    theorem: TheoremId,
    kernel: KernelSpec<f64>,
    alpha: f64,
    forcing: ForcingSpec,
    horizons: &[usize],
    tolerance: f64,
) -> Scenario {
    Scenario {
        name: name.to_string(),
        theorem,
        kernel,
        nonlinearity: power(alpha),
        forcing,
        xi: 0.0,
        horizons: horizons.to_vec(),
        seeds: 1,
        base_seed: 0,
        tolerance,
        solver: SolverMode::Auto,
        params: ScenarioParams::default(),
    }
}

fn alternating(mu_plus: f64, mu_minus: f64, ratio: f64) -> ForcingSpec {
    ForcingSpec::AlternatingPower { mu_plus, mu_minus, ratio }
}

fn constructed(mu_minus: f64) -> ForcingSpec {
    ForcingSpec::ConstructedAlternating { mu_plus: 1.0, mu_minus, alpha: 0.5, kernel: geometric(1.0, 0.5) }
}

/// One calibrated scenario per theorem, plus the opposite regime where a
/// result has two sides (finite/infinite `lambda_2`, finite/divergent moments).
pub fn default_suite() -> Vec<Scenario> {
    use TheoremId::*;
    const SHORT: &[usize] = &[1_000, 10_000, 100_000];
    const LONG: &[usize] = &[10_000, 100_000, 1_000_000];
    let k = || geometric(1.0, 0.5);
    let calm = || geometric(0.2, 0.5);
    let heavy = |alpha| ForcingSpec::HeavytailIid { alpha };
    let gauss = ForcingSpec::GaussianIid { sigma: 1.0 };
    let declared = |lambda: Regime| ScenarioParams { lambda: Some(lambda), ..Default::default() };

    let mut suite = vec![
        base("bounded-sine", BoundedA, k(), 0.5, ForcingSpec::BoundedOscillation { amplitude: 1.0 }, SHORT, 1e-2),
        Scenario { seeds: 3, ..base("unbounded-gaussian", BoundedB, k(), 0.5, gauss.clone(), SHORT, 0.0) },
        Scenario { seeds: 5, ..base("maxratio-heavytail", Maxratio, k(), 0.3, heavy(1.5), SHORT, 0.05) },
        Scenario { seeds: 5, ..base("argmax-heavytail", ArgmaxCoupling, k(), 0.3, heavy(1.5), SHORT, 0.05) },
        base("growth-up-power", GrowthUp, k(), 0.5, ForcingSpec::MonotonePower { mu: 1.2 }, SHORT, 1e-2),
        base("growth-down-power", GrowthDown, k(), 0.5, ForcingSpec::MonotonePower { mu: 1.2 }, SHORT, 1e-2),
        base(
            "modulated-exponential",
            ModulatedGrowth,
            k(),
            0.5,
            ForcingSpec::PeriodicExponential { a: 0.05, pi: vec![1.0, 1.5, 2.0, 1.25, 1.75, 1.1, 1.9] },
            &[500, 1_000, 2_000],
            1e-3,
        ),
        Scenario {
            params: declared(Regime::Finite(0.5)),
            ..base("signed-lambda-half", SignedflucLambdaLt1, k(), 0.5, alternating(1.2, 1.2, 0.5), SHORT, 0.05)
        },
        Scenario {
            params: declared(Regime::Finite(2.0)),
            ..base("signed-lambda-two", SignedflucLambdaGt1, k(), 0.5, alternating(1.2, 1.2, 2.0), SHORT, 0.05)
        },
        Scenario {
            params: declared(Regime::Finite(1.0)),
            ..base("signed-lambda-one", SignedflucLambdaEq1, k(), 0.5, alternating(1.2, 1.2, 1.0), SHORT, 0.05)
        },
        Scenario {
            params: declared(Regime::Finite(0.5)),
            ..base("signed-lambda-positive", Signedfluc2LambdaPos, k(), 0.5, alternating(1.0, 1.0, 0.5), SHORT, 0.05)
        },
        Scenario {
            params: declared(Regime::Finite(0.0)),
            ..base("signed-lambda-zero", Signedfluc2LambdaZero, k(), 0.5, alternating(1.2, 0.8, 1.0), SHORT, 0.05)
        },
        Scenario {
            params: declared(Regime::Infinite),
            ..base("signed-lambda-infinite", Signedfluc2LambdaInf, k(), 0.5, alternating(0.8, 1.2, 1.0), SHORT, 0.05)
        },
        Scenario {
            xi: 1.0,
            params: ScenarioParams {
                lambda: Some(Regime::Finite(0.0)),
                lambda2: Some(Regime::Infinite),
                ..Default::default()
            },
            ..base("constructed-lambda2-infinite", SignedfluctLambda2, k(), 0.5, constructed(0.7), SHORT, 0.15)
        },
        Scenario {
            xi: 1.0,
            params: ScenarioParams {
                lambda: Some(Regime::Finite(0.0)),
                lambda2: Some(Regime::Finite(4.0 / 3.0)),
                ..Default::default()
            },
            ..base("constructed-lambda2-finite", SignedfluctLambda2, k(), 0.5, constructed(0.2), SHORT, 0.05)
        },
        Scenario {
            seeds: 20,
            params: ScenarioParams {
                scaler: Some(ScalerSpec::SqrtLog),
                band: Some([0.85, 1.1]),
                ..Default::default()
            },
            ..base("limsup-gaussian", LimsupRho, calm(), 0.5, gauss.clone(), LONG, 0.1)
        },
        Scenario {
            seeds: 15,
            params: ScenarioParams {
                upper_scaler: Some(ScalerSpec::power(0.6).expect("valid")),
                lower_scaler: Some(ScalerSpec::power(0.4).expect("valid")),
                log_exponent: Some(0.5),
                ..Default::default()
            },
            ..base("squeeze-heavytail", LimsupSqueeze, k(), 0.5, heavy(2.0), LONG, 0.1)
        },
        Scenario {
            seeds: 20,
            params: ScenarioParams {
                scaler: Some(ScalerSpec::SqrtLog),
                band: Some([0.85, 1.1]),
                ..Default::default()
            },
            ..base("limsup-signed-gaussian", LimsupSigned, calm(), 0.5, gauss.clone(), LONG, 0.1)
        },
        Scenario {
            seeds: 5,
            params: ScenarioParams {
                weight: Some(ConvexWeightSpec::gaussian_exp(0.3).and_then(|w| w.with_eta(0.1)).expect("valid")),
                expected: Some(1.0 / 0.4f64.sqrt()),
                divergent: Some(false),
                ..Default::default()
            },
            ..base("ergodic-gaussian-finite", ErgodicPhi, calm(), 0.5, gauss.clone(), LONG, 0.05)
        },
        Scenario {
            seeds: 10,
            params: ScenarioParams {
                weight: Some(ConvexWeightSpec::gaussian_exp(0.7).expect("valid")),
                divergent: Some(true),
                ..Default::default()
            },
            ..base("ergodic-gaussian-divergent", ErgodicPhi, calm(), 0.5, gauss, LONG, 0.05)
        },
        Scenario {
            seeds: 5,
            params: ScenarioParams {
                weight: Some(ConvexWeightSpec::power(1.0).and_then(|w| w.with_eta(0.1)).expect("valid")),
                expected: Some(2.0),
                divergent: Some(false),
                ..Default::default()
            },
            ..base("moment-heavytail-finite", PthMoment, k(), 0.5, heavy(2.0), LONG, 0.1)
        },
        Scenario {
            seeds: 10,
            params: ScenarioParams {
                weight: Some(ConvexWeightSpec::power(2.5).expect("valid")),
                divergent: Some(true),
                ..Default::default()
            },
            ..base("moment-heavytail-divergent", PthMoment, k(), 0.5, heavy(2.0), LONG, 0.1)
        },
    ];
    for (i, s) in suite.iter_mut().enumerate() {
        s.base_seed = 0x5eed + i as u64;
    }
    suite
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_is_valid_and_covers_every_theorem() {
        let suite = default_suite();
        for s in &suite {
            s.validate().unwrap();
        }
        for id in TheoremId::ALL {
            assert!(suite.iter().any(|s| s.theorem == id), "{id} missing");
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut suite = default_suite();
        suite.truncate(1);
        suite.push(suite[0].clone());
        assert!(run_suite(&suite).is_err());
    }
}
