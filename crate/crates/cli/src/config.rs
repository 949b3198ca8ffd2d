//! TOML run configuration with strict key checking.
//!
//! Every section is deserialized on its own so that all problems in a file
//! are reported together, each with the line it was found on. Unknown keys
//! are found by serializing the typed value back and comparing key sets
//! against the input, which also covers flattened and tagged sections.

use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue, ValueDeserializer};
use toml::Spanned;
use volterra_core::diagnostics::ConvexWeightSpec;
use volterra_core::theorems::Scenario;
use volterra_core::{ForcingSpec, Kernel, Nonlinearity, Scaler, SolverMode};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub solver: SolverMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<ConvexWeightSpec<f64>>,
    /// `eps` values for the pathwise inequalities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSection {
    /// Include the built-in scenarios.
    #[serde(default = "yes")]
    pub default: bool,
    /// Run only the named scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<String>>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self { default: true, only: None }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    /// Scenario to sweep; without it the simulation sections are swept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Dotted path of a numeric field, e.g. `nonlinearity.alpha`.
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Parsed configuration file. Sections absent from the file take defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub run: RunSection,
    pub kernel: Option<Kernel>,
    pub nonlinearity: Option<Nonlinearity>,
    pub forcing: Option<ForcingSpec>,
    pub diagnostics: DiagnosticsSection,
    pub suite: SuiteSection,
    pub sweep: Option<SweepSection>,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// All problems found in a configuration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Issue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem(s)):", self.0.len())?;
        for i in &self.0 {
            writeln!(f, "  {i}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Parsed file plus unknown keys that were ignored in permissive mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: FileConfig,
    pub warnings: Vec<Issue>,
}

const SECTIONS: [&str; 8] = ["run", "kernel", "nonlinearity", "forcing", "diagnostics", "suite", "sweep", "scenario"];

struct Parser<'a> {
    text: &'a str,
    strict: bool,
    errors: Vec<Issue>,
    warnings: Vec<Issue>,
}

impl Parser<'_> {
    fn line(&self, span: std::ops::Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn error(&mut self, span: Option<std::ops::Range<usize>>, message: String) {
        let line = span.map(|s| self.line(s));
        self.errors.push(Issue { line, message });
    }

    fn unknown(&mut self, span: std::ops::Range<usize>, path: &str) {
        let issue = Issue { line: Some(self.line(span)), message: format!("unknown key `{path}`") };
        if self.strict {
            self.errors.push(issue);
        } else {
            self.warnings.push(issue);
        }
    }

    fn section<T: DeserializeOwned + Serialize>(&mut self, name: &str, value: &Spanned<DeValue<'_>>) -> Option<T> {
        let span = value.span();
        match T::deserialize(ValueDeserializer::from(value.clone())) {
            Ok(v) => {
                match toml::Value::try_from(&v) {
                    Ok(back) => self.compare(name, value, &back),
                    Err(e) => self.error(Some(span), format!("[{name}]: {e}")),
                }
                Some(v)
            }
            Err(e) => {
                let at = e.span().or(Some(span));
                self.error(at, format!("[{name}]: {}", e.message()));
                None
            }
        }
    }

    fn compare(&mut self, path: &str, input: &Spanned<DeValue<'_>>, typed: &toml::Value) {
        match (input.get_ref(), typed) {
            (DeValue::Table(t), toml::Value::Table(back)) => {
                for (k, v) in t.iter() {
                    let key = format!("{path}.{}", k.get_ref());
                    match back.get(k.get_ref().as_ref()) {
                        Some(b) => self.compare(&key, v, b),
                        None => self.unknown(k.span(), &key),
                    }
                }
            }
            (DeValue::Array(a), toml::Value::Array(back)) => {
                for (i, (v, b)) in a.iter().zip(back).enumerate() {
                    self.compare(&format!("{path}[{i}]"), v, b);
                }
            }
            _ => {}
        }
    }
}

/// Parse `text`. In strict mode unknown keys are errors, otherwise warnings.
pub fn parse_config(text: &str, strict: bool) -> Result<Parsed, ConfigErrors> {
    let mut p = Parser { text, strict, errors: Vec::new(), warnings: Vec::new() };
    let (root, syntax) = DeTable::parse_recoverable(text);
    if !syntax.is_empty() {
        for e in syntax {
            p.error(e.span(), e.message().to_string());
        }
        return Err(ConfigErrors(p.errors));
    }
    let mut cfg = FileConfig::default();
    for (key, value) in root.get_ref().iter() {
        let name = key.get_ref().as_ref();
        match name {
            "run" => cfg.run = p.section(name, value).unwrap_or_default(),
            "kernel" => cfg.kernel = p.section(name, value),
            "nonlinearity" => cfg.nonlinearity = p.section(name, value),
            "forcing" => cfg.forcing = p.section(name, value),
            "diagnostics" => cfg.diagnostics = p.section(name, value).unwrap_or_default(),
            "suite" => cfg.suite = p.section(name, value).unwrap_or_default(),
            "sweep" => cfg.sweep = p.section(name, value),
            "scenario" => cfg.scenarios = p.section(name, value).unwrap_or_default(),
            _ => {
                let hint = SECTIONS
                    .iter()
                    .find(|s| strsim(s, name))
                    .map(|s| format!(" (did you mean `{s}`?)"))
                    .unwrap_or_default();
                let issue = Issue { line: Some(p.line(key.span())), message: format!("unknown key `{name}`{hint}") };
                if strict {
                    p.errors.push(issue);
                } else {
                    p.warnings.push(issue);
                }
            }
        }
    }
    validate(&cfg, &root, &mut p);
    if p.errors.is_empty() {
        Ok(Parsed { config: cfg, warnings: p.warnings })
    } else {
        p.errors.sort_by_key(|i| i.line);
        Err(ConfigErrors(p.errors))
    }
}

// edit distance at most one
fn strsim(a: &str, b: &str) -> bool {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(ca != cb)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()] <= 1
}

fn validate(cfg: &FileConfig, root: &Spanned<DeTable<'_>>, p: &mut Parser<'_>) {
    let span_of = |name: &str| root.get_ref().get(name).map(|v| v.span());
    let mut check = |name: &str, r: volterra_core::Result<()>| {
        if let Err(e) = r {
            let s = span_of(name);
            p.error(s, format!("[{name}]: {e}"));
        }
    };
    if let Some(k) = &cfg.kernel {
        check("kernel", k.validate());
    }
    if let Some(f) = &cfg.nonlinearity {
        check("nonlinearity", f.validate());
    }
    if let Some(h) = &cfg.forcing {
        check("forcing", h.validate());
    }
    if cfg.run.horizon == Some(0) {
        check("run", Err(volterra_core::Error::Argument("horizon must be positive".into())));
    }
    if !cfg.run.xi.is_finite() {
        check("run", Err(volterra_core::Error::Argument("xi must be finite".into())));
    }
    let d = &cfg.diagnostics;
    if let Some(tf) = d.tail_fraction {
        if !(tf > 0.0 && tf <= 1.0) {
            check("diagnostics", Err(volterra_core::Error::Argument(format!("tail_fraction must lie in (0, 1], got {tf}"))));
        }
    }
    if let Some(s) = &d.scaler {
        check("diagnostics", s.validate());
    }
    if let Some(w) = &d.weight {
        check("diagnostics", w.validate());
    }
    for s in &cfg.scenarios {
        check("scenario", s.validate());
    }
    if let Some(sw) = &cfg.sweep {
        if sw.values.is_empty() {
            check("sweep", Err(volterra_core::Error::Argument("sweep needs at least one value".into())));
        }
    }
}
