//! Columnar text tables and line-delimited check reports.
//!
//! Tables are comma separated with `# key: value` metadata lines on top, a
//! header row starting with `n`, and one row per index. Values carry 17
//! significant digits, enough to round-trip any double; gaps are empty cells.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde_json::{Map, Value};

use crate::diagnostics::Track;
use crate::engine::Path;
use crate::error::{Error, Result};
use crate::forcing::ForcingSequence;
use crate::scalar::Scalar;
use crate::seqcore::RealSeq;
use crate::theorems::{TheoremCheck, Verdict};

pub const TOOL_NAME: &str = "volterra";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata written on top of every output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    /// Tool name, version and `fingerprint`.
    pub fn new(fingerprint: &str) -> Self {
        Self::default()
            .with("tool", TOOL_NAME)
            .with("version", TOOL_VERSION)
            .with("fingerprint", fingerprint)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// 17 significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Index-aligned named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Metadata,
    names: Vec<String>,
    rows: BTreeMap<usize, Vec<Option<f64>>>,
}

impl Table {
    pub fn new(metadata: Metadata) -> Self {
        Self { metadata, ..Default::default() }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Add a column from `(index, value)` entries; other rows get a gap.
    pub fn column(&mut self, name: &str, entries: impl IntoIterator<Item = (usize, Option<f64>)>) -> &mut Self {
        let col = self.names.len();
        self.names.push(name.to_string());
        for row in self.rows.values_mut() {
            row.push(None);
        }
        for (n, v) in entries {
            let width = self.names.len();
            self.rows.entry(n).or_insert_with(|| vec![None; width])[col] = v;
        }
        self
    }

    pub fn seq<T: Scalar>(&mut self, name: &str, seq: &RealSeq<T>) -> &mut Self {
        self.column(name, seq.iter().map(|(n, v)| (n, Some(v.as_f64()))))
    }

    pub fn track<T: Scalar>(&mut self, name: &str, track: &Track<T>) -> &mut Self {
        let start = track.start();
        let entries = track.values().iter().enumerate().map(|(i, v)| (start + i, v.map(|v| v.as_f64())));
        self.column(name, entries)
    }

    /// Values of column `name` by index (gaps omitted).
    pub fn values(&self, name: &str) -> Option<Vec<(usize, f64)>> {
        let col = self.names.iter().position(|c| c == name)?;
        Some(self.rows.iter().filter_map(|(&n, r)| r[col].map(|v| (n, v))).collect())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata.entries {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(std::iter::once("n").chain(self.names.iter().map(String::as_str)))?;
        for (n, row) in &self.rows {
            let cells = row.iter().map(|v| v.map(format_value).unwrap_or_default());
            out.write_record(std::iter::once(n.to_string()).chain(cells))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut metadata = Metadata::default();
        let mut body = String::new();
        for line in r.lines() {
            let line = line?;
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once(':') {
                    metadata.entries.push((k.trim().to_string(), v.trim().to_string()));
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let headers = rd.headers()?.clone();
        if headers.get(0) != Some("n") {
            return Err(Error::Format("table header must start with `n`".into()));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut rows = BTreeMap::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::Format(format!("row {}: {what}", line + 1));
            let n: usize = rec.get(0).unwrap_or("").parse().map_err(|_| bad("invalid index"))?;
            let row = rec
                .iter()
                .skip(1)
                .map(|c| match c.trim() {
                    "" => Ok(None),
                    c => c.parse::<f64>().map(Some).map_err(|_| bad(&format!("invalid number `{c}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if rows.insert(n, row).is_some() {
                return Err(bad("duplicate index"));
            }
        }
        Ok(Self { metadata, names, rows })
    }
}

/// Columns `n, H, x, S_prev` with `x(n) = H(n) + S_prev(n)`.
pub fn path_table<T: Scalar>(path: &Path<T>, metadata: Metadata) -> Table {
    let solver = serde_json::to_string(&path.solver).unwrap_or_default();
    let mut t = Table::new(metadata.with("solver", solver));
    t.seq("H", &path.h).seq("x", &path.x);
    t.column("S_prev", path.s.iter().map(|(n, v)| (n + 1, Some(v.as_f64()))));
    t
}

/// Forcing values `H(1..=N)` from column `H` of a table, for replay.
pub fn forcing_from_table(table: &Table) -> Result<ForcingSequence<f64>> {
    let h = table
        .values("H")
        .ok_or_else(|| Error::Format("table has no `H` column".into()))?;
    for (i, &(n, _)) in h.iter().enumerate() {
        if n != i + 1 {
            return Err(Error::Format(format!("forcing column must cover 1..=N without gaps, missing {}", i + 1)));
        }
    }
    if h.is_empty() {
        return Err(Error::Format("forcing column is empty".into()));
    }
    ForcingSequence::from_values(h.into_iter().map(|(_, v)| v).collect())
}

/// Line-delimited report: one header record, then one record per check.
pub fn write_report<W: Write>(mut w: W, metadata: &Metadata, checks: &[TheoremCheck]) -> Result<()> {
    let mut head = Map::new();
    head.insert("record".into(), "header".into());
    for (k, v) in &metadata.entries {
        head.insert(k.clone(), v.clone().into());
    }
    head.insert("checks".into(), checks.len().into());
    writeln!(w, "{}", Value::Object(head))?;
    for c in checks {
        let mut v = serde_json::to_value(c)?;
        if let Value::Object(m) = &mut v {
            m.insert("record".into(), "check".into());
        }
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report<R: BufRead>(r: R) -> Result<(Metadata, Vec<TheoremCheck>)> {
    let mut metadata = Metadata::default();
    let mut checks = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut v: Value = serde_json::from_str(&line)?;
        let record = v.get("record").and_then(Value::as_str).map(str::to_string);
        match record.as_deref() {
            Some("header") => {
                for (k, val) in v.as_object().into_iter().flatten() {
                    if k != "record" {
                        let s = val.as_str().map_or_else(|| val.to_string(), str::to_string);
                        metadata.entries.push((k.clone(), s));
                    }
                }
            }
            Some("check") => {
                v.as_object_mut().expect("object").remove("record");
                checks.push(serde_json::from_value(v)?);
            }
            _ => return Err(Error::Format(format!("line {}: unknown record", i + 1))),
        }
    }
    Ok((metadata, checks))
}

/// Plain-text verdict table; inconclusive checks are listed after it.
pub fn render_table(checks: &[TheoremCheck]) -> String {
    let wide = |f: fn(&TheoremCheck) -> String, title: &str| {
        checks.iter().map(|c| f(c).len()).chain([title.len()]).max().unwrap_or(0)
    };
    let (ws, wt) = (wide(|c| c.scenario.clone(), "scenario"), wide(|c| c.theorem.to_string(), "theorem"));
    let mut out = format!("{:ws$}  {:wt$}  {:12}  detail\n", "scenario", "theorem", "verdict");
    for c in checks {
        out += &format!("{:ws$}  {:wt$}  {:12}  {}\n", c.scenario, c.theorem.as_str(), c.verdict.as_str(), c.detail);
    }
    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    out += &format!(
        "\n{} pass, {} fail, {} inconclusive\n",
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Inconclusive)
    );
    let inconclusive: BTreeSet<&str> = checks
        .iter()
        .filter(|c| c.verdict == Verdict::Inconclusive)
        .map(|c| c.scenario.as_str())
        .collect();
    if !inconclusive.is_empty() {
        out += "inconclusive:\n";
        for s in inconclusive {
            out += &format!("  {s}\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, f64::MAX, 5e-324, std::f64::consts::PI] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(1.0).split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn table_round_trip_with_gaps() {
        let mut t = Table::new(Metadata::new("abc"));
        t.seq("x", &RealSeq::x_like(vec![1.0, 0.1, -3.0]).unwrap());
        t.seq("H", &RealSeq::h_like(vec![0.1, 7.0]).unwrap());
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# tool: volterra\n"));
        assert!(text.contains("\nn,x,H\n0,1.0000000000000000e0,\n"));
        let back = Table::read(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.metadata.get("fingerprint"), Some("abc"));
        let h = forcing_from_table(&back).unwrap();
        assert_eq!(h.values.values(), &[0.1, 7.0]);
    }

    #[test]
    fn forcing_column_must_be_contiguous() {
        let mut t = Table::default();
        t.column("H", [(1, Some(1.0)), (3, Some(2.0))]);
        assert!(forcing_from_table(&t).is_err());
        assert!(Table::read("m,x\n0,1\n".as_bytes()).is_err());
        assert!(Table::read("n,x\n0,abc\n".as_bytes()).is_err());
    }
}
