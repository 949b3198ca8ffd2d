//! Executable checks of the asymptotic results: each scenario runs the
//! equation along a horizon ladder and judges the measured statistics.

mod checks;
mod judge;
mod scenario;
mod suite;

pub use checks::{
    run_check, GROWTH_EXPONENT_THRESHOLD, LAMBDA2_REGIME_REL_TOL, LAMBDA_REGIME_TOL, PATHWISE_EPS,
    TREND_SLOPE,
};
pub use judge::{
    median, Criterion, HorizonStats, Precondition, Rule, TheoremCheck, Verdict, LADDER_FLOOR,
    LADDER_SLACK,
};
pub use scenario::{Scenario, ScenarioParams, TheoremId};
pub use suite::{default_suite, run_suite, SuiteReport};
