use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scenario::TheoremId;

/// Slack allowed when a ladder statistic fails to improve from one horizon to the next.
pub const LADDER_SLACK: f64 = 1.2;

/// Below `tolerance * LADDER_FLOOR` a statistic counts as converged and the
/// ladder comparison is skipped.
pub const LADDER_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// How a criterion's values are judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Final value `<= limit`, and along the ladder each value is at most
    /// `LADDER_SLACK` times the previous one (or already below the floor).
    Converges,
    /// Final value `<= limit`.
    AtMost,
    /// Final value `>= limit`.
    AtLeast,
    /// Strictly increasing along the ladder.
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub rule: Rule,
    pub limit: f64,
    /// One value per horizon for ladder rules; a single value otherwise.
    pub values: Vec<Option<f64>>,
    pub passed: bool,
}

impl Criterion {
    pub fn new(name: &str, rule: Rule, limit: f64, values: Vec<f64>) -> Self {
        let passed = judge(rule, limit, &values);
        Self { name: name.to_string(), rule, limit, values: values.into_iter().map(finite).collect(), passed }
    }
}

fn judge(rule: Rule, limit: f64, values: &[f64]) -> bool {
    let Some(&last) = values.last() else {
        return false;
    };
    if last.is_nan() {
        return false;
    }
    match rule {
        Rule::AtMost => last <= limit,
        Rule::AtLeast => last >= limit,
        Rule::Increasing => values.len() >= 2 && values.windows(2).all(|w| w[1] > w[0]),
        Rule::Converges => {
            last <= limit
                && values.windows(2).all(|w| {
                    w[1] <= LADDER_SLACK * w[0] || w[1] <= LADDER_FLOOR * limit
                })
        }
    }
}

/// A regime assumption checked on the realised forcing before judging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    pub observed: Option<f64>,
    pub expected: String,
    pub holds: bool,
}

/// Median (over seeds) statistics at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonStats {
    pub horizon: usize,
    pub values: BTreeMap<String, Option<f64>>,
}

/// Outcome of checking one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub scenario: String,
    pub theorem: TheoremId,
    pub fingerprint: String,
    pub seeds: Vec<u64>,
    pub horizons: Vec<usize>,
    pub tolerance: f64,
    pub statistics: Vec<HorizonStats>,
    pub summary: BTreeMap<String, Option<f64>>,
    pub preconditions: Vec<Precondition>,
    pub criteria: Vec<Criterion>,
    pub verdict: Verdict,
    pub detail: String,
}

impl TheoremCheck {
    /// Verdict from preconditions and criteria: any failed precondition makes the
    /// check inconclusive, otherwise it passes iff every criterion passes.
    pub fn decide(preconditions: &[Precondition], criteria: &[Criterion]) -> (Verdict, String) {
        let bad_pre: Vec<&str> = preconditions.iter().filter(|p| !p.holds).map(|p| p.name.as_str()).collect();
        if !bad_pre.is_empty() {
            return (Verdict::Inconclusive, format!("regime not confirmed: {}", bad_pre.join(", ")));
        }
        let failed: Vec<&str> = criteria.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if criteria.is_empty() {
            return (Verdict::Fail, "no criteria evaluated".into());
        }
        if failed.is_empty() {
            (Verdict::Pass, String::new())
        } else {
            (Verdict::Fail, format!("failed: {}", failed.join(", ")))
        }
    }
}

pub(crate) fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Median of `values`, treating NaN as missing; `+inf` sorts last.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else if v[m - 1].is_infinite() && v[m].is_infinite() && v[m - 1] == v[m] {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
