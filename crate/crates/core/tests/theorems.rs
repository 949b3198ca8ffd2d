use volterra_core::diagnostics::{ConvexWeightSpec, Regime};
use volterra_core::seqcore::{KernelSpec, NonlinearitySpec};
use volterra_core::theorems::{
    default_suite, run_check, run_suite, Scenario, ScenarioParams, TheoremId, Verdict,
};
use volterra_core::ForcingSpec;

fn named(name: &str) -> Scenario {
    default_suite().into_iter().find(|s| s.name == name).unwrap()
}

#[test]
fn empty_suite_is_an_empty_success() {
    let r = run_suite(&[]).unwrap();
    assert!(r.checks.is_empty());
    assert!(!r.any_failed());
}

#[test]
fn default_suite_passes() {
    let r = run_suite(&default_suite()).unwrap();
    let bad: Vec<_> = r
        .checks
        .iter()
        .filter(|c| c.verdict != Verdict::Pass)
        .map(|c| format!("{}: {:?} {}", c.scenario, c.verdict, c.detail))
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
    // merged in scenario order
    let names: Vec<_> = r.checks.iter().map(|c| c.scenario.clone()).collect();
    let want: Vec<_> = default_suite().into_iter().map(|s| s.name).collect();
    assert_eq!(names, want);
}

#[test]
fn zero_tolerance_fails() {
    let mut s = named("maxratio-heavytail");
    s.tolerance = 0.0;
    let c = run_check(&s).unwrap();
    assert_eq!(c.verdict, Verdict::Fail);
    let r = run_suite(&[s]).unwrap();
    assert!(r.any_failed());
}

#[test]
fn wrong_declared_regime_is_inconclusive() {
    // forcing has lambda = 0.5 but the scenario claims lambda = 1
    let mut s = named("signed-lambda-one");
    s.forcing = ForcingSpec::AlternatingPower { mu_plus: 1.2, mu_minus: 1.2, ratio: 0.5 };
    let c = run_check(&s).unwrap();
    assert_eq!(c.verdict, Verdict::Inconclusive, "{}", c.detail);

    let mut s = named("signed-lambda-infinite");
    s.params.lambda = Some(Regime::Finite(0.5));
    assert_eq!(run_check(&s).unwrap().verdict, Verdict::Inconclusive);
}

#[test]
fn null_kernel_boundedness_is_exact() {
    let mut s = named("bounded-sine");
    s.kernel = KernelSpec::null();
    let c = run_check(&s).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
    let (_, p) = s.realize(0).unwrap();
    for n in 1..=s.max_horizon() {
        assert_eq!(p.x.get(n), p.h.get(n));
    }
}

#[test]
fn null_kernel_growth_ratio_is_one() {
    let mut s = named("growth-up-power");
    s.kernel = KernelSpec::null();
    let c = run_check(&s).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
    let last = c.statistics.last().unwrap();
    assert_eq!(last.values["ratio_deviation"], Some(0.0));
}

#[test]
fn checks_are_reproducible() {
    let s = named("argmax-heavytail");
    assert_eq!(run_check(&s).unwrap(), run_check(&s).unwrap());
}

#[test]
fn malformed_scenarios_are_rejected() {
    let mut s = named("growth-up-power");
    s.horizons = vec![1000, 100];
    assert!(run_suite(&[s]).is_err());

    let json = serde_json::to_value(named("growth-up-power")).unwrap();
    let mut bad = json.clone();
    bad["theorem"] = "no-such-theorem".into();
    assert!(serde_json::from_value::<Scenario>(bad).is_err());
    let back: Scenario = serde_json::from_value(json).unwrap();
    assert_eq!(back, named("growth-up-power"));

    let mut s = named("limsup-gaussian");
    s.params.scaler = None;
    assert!(s.validate().is_err());
}

#[test]
fn overflowing_moment_counts_as_divergence() {
    // |H|^40 of Pareto(0.3) values overflows the running average
    let s = Scenario {
        name: "overflowing-moment".into(),
        theorem: TheoremId::PthMoment,
        kernel: KernelSpec::geometric(1.0, 0.5).unwrap(),
        nonlinearity: NonlinearitySpec::signed_power(0.5).unwrap(),
        forcing: ForcingSpec::HeavytailIid { alpha: 0.3 },
        xi: 0.0,
        horizons: vec![1_000, 10_000],
        seeds: 3,
        base_seed: 1,
        tolerance: 0.1,
        solver: Default::default(),
        params: ScenarioParams {
            weight: Some(ConvexWeightSpec::power(40.0).unwrap()),
            divergent: Some(true),
            ..Default::default()
        },
    };
    let c = run_check(&s).unwrap();
    assert_eq!(c.verdict, Verdict::Pass, "{}", c.detail);
    assert_eq!(c.summary["growth_x"], None);
}
