use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use volterra_core::diagnostics::{
    check_pathwise, estimate_lambda, estimate_lambda2, phi_time_average, ratio_track, running_max_abs,
    running_signed_max, tail_sup_ratio, default_guard, MaxTrack, RegimeEstimate, Side, SupKind,
    DEFAULT_TAIL_FRACTION,
};
use volterra_core::fingerprint::digest;
use volterra_core::io::{forcing_from_table, path_table, read_report, render_table, write_report, Metadata, Table};
use volterra_core::theorems::{default_suite, run_suite, Scenario, TheoremCheck, PATHWISE_EPS};
use volterra_core::{generate, simulate, Config, Forcing, Sequence, SolutionPath};

use crate::config::{parse_config, FileConfig, SweepSection};
use crate::{Cli, Command, Options, DEFAULT_OUT_DIR, OUT_DIR_ENV};

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let opts = &cli.options;
    let cfg = load_config(opts)?;
    let out = out_dir(opts, &cfg)?;
    match &cli.command {
        Command::Simulate { replay } => {
            let (config, path) = simulate_config(opts, &cfg, replay.as_deref())?;
            let file = out.join("path.csv");
            write_table(&file, &path_table(&path, metadata(opts, &cfg, &config)))?;
            println!("wrote {} (N = {}, solver {:?})", file.display(), path.horizon(), path.solver);
        }
        Command::Diagnose { replay } => {
            let (config, path) = simulate_config(opts, &cfg, replay.as_deref())?;
            diagnose(opts, &cfg, &config, &path, &out)?;
            println!("wrote {} and {}", out.join("tracks.csv").display(), out.join("summary.json").display());
        }
        Command::Verify => {
            let scenarios = suite(opts, &cfg)?;
            let report = run_suite(&scenarios)?;
            let meta = Metadata::new(&digest(&scenarios)).with("scenarios", scenarios.len());
            write_report_files(&out, "report", &meta, &report.checks)?;
            print!("{}", render_table(&report.checks));
            if report.any_failed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sweep => {
            let sweep = cfg.sweep.clone().ok_or_else(|| anyhow!("sweep needs a [sweep] section"))?;
            match &sweep.scenario {
                Some(name) => sweep_scenario(opts, &cfg, &sweep, name, &out)?,
                None => sweep_simulation(opts, &cfg, &sweep, &out)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_config(opts: &Options) -> Result<FileConfig> {
    let Some(p) = &opts.config else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let parsed = parse_config(&text, !opts.permissive).map_err(|e| anyhow!("{}: {e}", p.display()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w} (ignored)", p.display());
    }
    Ok(parsed.config)
}

fn out_dir(opts: &Options, cfg: &FileConfig) -> Result<PathBuf> {
    let dir = opts
        .out
        .clone()
        .or_else(|| cfg.run.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn metadata(opts: &Options, cfg: &FileConfig, config: &Config) -> Metadata {
    Metadata::new(&config.fingerprint())
        .with("horizon", config.horizon)
        .with("seed", seed(opts, cfg))
}

fn seed(opts: &Options, cfg: &FileConfig) -> u64 {
    opts.seed.or(cfg.run.seed).unwrap_or(0)
}

fn simulate_config(opts: &Options, cfg: &FileConfig, replay: Option<&FsPath>) -> Result<(Config, SolutionPath)> {
    let kernel = cfg.kernel.clone().ok_or_else(|| anyhow!("simulation needs a [kernel] section"))?;
    let f = cfg.nonlinearity.clone().ok_or_else(|| anyhow!("simulation needs a [nonlinearity] section"))?;
    let horizon = opts.horizon.or(cfg.run.horizon);
    let forcing: Forcing = match replay {
        Some(file) => {
            let table = Table::read(BufReader::new(File::open(file).with_context(|| format!("opening {}", file.display()))?))?;
            forcing_from_table(&table)?
        }
        None => {
            let spec = cfg.forcing.as_ref().ok_or_else(|| anyhow!("simulation needs a [forcing] section"))?;
            let n = horizon.ok_or_else(|| anyhow!("no horizon: set [run] horizon or pass --horizon"))?;
            generate(spec, n, seed(opts, cfg))?
        }
    };
    let n = horizon.unwrap_or(forcing.len());
    if n > forcing.len() {
        bail!("horizon {n} exceeds the {} replayed forcing values", forcing.len());
    }
    let config = Config::new(kernel, f, forcing, cfg.run.xi).with_horizon(n).with_solver(cfg.run.solver);
    let path = simulate(&config)?;
    Ok((config, path))
}

fn write_table(file: &FsPath, table: &Table) -> Result<()> {
    let w = BufWriter::new(File::create(file).with_context(|| format!("creating {}", file.display()))?);
    table.write(w)?;
    Ok(())
}

fn write_json(file: &FsPath, value: &Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(file).with_context(|| format!("creating {}", file.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_report_files(dir: &FsPath, stem: &str, meta: &Metadata, checks: &[TheoremCheck]) -> Result<()> {
    let jsonl = dir.join(format!("{stem}.jsonl"));
    let w = BufWriter::new(File::create(&jsonl).with_context(|| format!("creating {}", jsonl.display()))?);
    write_report(w, meta, checks)?;
    let mut text = String::new();
    for (k, v) in &meta.entries {
        text += &format!("# {k}: {v}\n");
    }
    text += &render_table(checks);
    fs::write(dir.join(format!("{stem}.txt")), text)?;
    // a report that does not read back would be useless for regression diffs
    let (_, back) = read_report(BufReader::new(File::open(&jsonl)?))?;
    debug_assert_eq!(back.len(), checks.len());
    Ok(())
}

fn diagnose(opts: &Options, cfg: &FileConfig, config: &Config, path: &SolutionPath, out: &FsPath) -> Result<()> {
    let (x, h) = (&path.x, &path.h);
    let d = &cfg.diagnostics;
    let tf = opts.tail_fraction.or(d.tail_fraction).unwrap_or(DEFAULT_TAIL_FRACTION);
    let xs = running_max_abs(x)?;
    let hs = running_max_abs(h)?;
    // x* restricted to the indices of H*
    let xs_h = Sequence::h_like(xs.values().values()[1..].to_vec())?;
    let ratio = ratio_track(&xs_h, hs.values(), default_guard())?;

    let mut t = Table::new(metadata(opts, cfg, config).with("tail_fraction", tf));
    t.seq("x_star", xs.values()).seq("h_star", hs.values());
    let times = |m: &MaxTrack<f64>| {
        let start = m.start();
        m.argmax_times().iter().enumerate().map(move |(i, &t)| (start + i, Some(t as f64))).collect::<Vec<_>>()
    };
    t.column("t_x", times(&xs)).column("t_h", times(&hs));
    for (name, seq, side) in [
        ("x_plus", x, Side::Plus),
        ("x_minus", x, Side::Minus),
        ("h_plus", h, Side::Plus),
        ("h_minus", h, Side::Minus),
    ] {
        t.seq(name, running_signed_max(seq, side)?.values());
    }
    t.track("x_star_over_h_star", &ratio);

    let mut summary = json!({
        "tool": volterra_core::io::TOOL_NAME,
        "version": volterra_core::io::TOOL_VERSION,
        "fingerprint": config.fingerprint(),
        "horizon": path.horizon(),
        "seed": seed(opts, cfg),
        "solver": path.solver,
        "s_error_bound": path.s_error_bound,
        "tail_fraction": tf,
        "x_star": xs.last(),
        "h_star": hs.last(),
        "record_times_x": xs.record_times().len(),
        "record_times_h": hs.record_times().len(),
        "max_ratio": {
            "final": ratio.last_point().map(|p| p.1),
            "final_window": ratio.final_summary(),
            "gaps": ratio.gaps(),
        },
        "lambda": regime_json(estimate_lambda(h)),
        "lambda2": regime_json(estimate_lambda2(h, &config.nonlinearity)),
    });
    if let Some(a) = &d.scaler {
        let rho = |seq, kind| tail_sup_ratio(seq, a, tf, kind).map_or_else(|e| json!({ "error": e.to_string() }), |v| json!(v));
        summary["rho"] = json!({
            "x": rho(x, SupKind::Abs), "h": rho(h, SupKind::Abs),
            "x_plus": rho(x, SupKind::Plus), "h_plus": rho(h, SupKind::Plus),
            "x_minus": rho(x, SupKind::Minus), "h_minus": rho(h, SupKind::Minus),
        });
    }
    if let Some(w) = &d.weight {
        let mut finals = serde_json::Map::new();
        for (name, seq) in [("phi_x", x), ("phi_h", h)] {
            match phi_time_average(seq, w) {
                Ok(a) => {
                    finals.insert(name.into(), json!(a.values().last()));
                    t.seq(name, &a);
                }
                Err(e) => {
                    finals.insert(name.into(), json!({ "divergence": e.to_string() }));
                }
            }
        }
        summary["phi"] = Value::Object(finals);
    }
    let eps = d.eps.clone().unwrap_or_else(|| PATHWISE_EPS.to_vec());
    let mut checks = Vec::new();
    for e in eps {
        checks.extend(check_pathwise(path, &config.kernel, &config.nonlinearity, e)?);
    }
    summary["pathwise"] = serde_json::to_value(&checks)?;

    write_table(&out.join("tracks.csv"), &t)?;
    write_json(&out.join("summary.json"), &summary)
}

fn regime_json(r: volterra_core::Result<RegimeEstimate<f64>>) -> Value {
    match r {
        Ok(est) => json!({
            "regime": est.regime,
            "evidence": est.evidence,
            "final_window": est.track.final_summary(),
            "gaps": est.track.gaps(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Built-in and configured scenarios with the command-line overrides applied.
fn suite(opts: &Options, cfg: &FileConfig) -> Result<Vec<Scenario>> {
    let mut all = if cfg.suite.default { default_suite() } else { Vec::new() };
    all.extend(cfg.scenarios.iter().cloned());
    if let Some(only) = &cfg.suite.only {
        for name in only {
            if !all.iter().any(|s| &s.name == name) {
                bail!("unknown scenario `{name}` in [suite] only");
            }
        }
        all.retain(|s| only.contains(&s.name));
    }
    for s in &mut all {
        apply_overrides(opts, s);
    }
    Ok(all)
}

fn apply_overrides(opts: &Options, s: &mut Scenario) {
    if let Some(seed) = opts.seed {
        s.base_seed = seed;
    }
    if let Some(n) = opts.horizon {
        s.horizons.retain(|&h| h < n);
        s.horizons.push(n);
    }
    if let Some(tf) = opts.tail_fraction {
        s.params.tail_fraction = Some(tf);
    }
}

/// Set the numeric field at dotted `path` inside `value`.
fn set_parameter(value: &mut Value, path: &str, x: f64) -> Result<()> {
    let mut cur = value;
    for part in path.split('.') {
        cur = cur
            .get_mut(part)
            .ok_or_else(|| anyhow!("sweep parameter `{path}`: no field `{part}`"))?;
    }
    if !cur.is_number() {
        bail!("sweep parameter `{path}` is not a number");
    }
    *cur = if x.fract() == 0.0 && cur.is_u64() && x >= 0.0 { json!(x as u64) } else { json!(x) };
    Ok(())
}

fn sweep_scenario(opts: &Options, cfg: &FileConfig, sweep: &SweepSection, name: &str, out: &FsPath) -> Result<()> {
    let pool = suite(opts, &FileConfig { suite: Default::default(), ..cfg.clone() })?;
    let base = pool
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| anyhow!("unknown scenario `{name}` in [sweep]"))?;
    let mut points = Vec::new();
    for &v in &sweep.values {
        let mut value = serde_json::to_value(&base)?;
        set_parameter(&mut value, &sweep.parameter, v)?;
        let mut s: Scenario = serde_json::from_value(value)?;
        s.name = format!("{name}[{}={v}]", sweep.parameter);
        points.push(s);
    }
    let report = run_suite(&points)?;
    for (i, (s, c)) in points.iter().zip(&report.checks).enumerate() {
        let meta = Metadata::new(&s.fingerprint()).with("parameter", &sweep.parameter).with("value", sweep.values[i]);
        write_report_files(out, &format!("sweep-{i:03}"), &meta, std::slice::from_ref(c))?;
    }
    print!("{}", render_table(&report.checks));
    Ok(())
}

fn sweep_simulation(opts: &Options, cfg: &FileConfig, sweep: &SweepSection, out: &FsPath) -> Result<()> {
    let base = json!({
        "run": cfg.run,
        "kernel": cfg.kernel,
        "nonlinearity": cfg.nonlinearity,
        "forcing": cfg.forcing,
        "diagnostics": cfg.diagnostics,
    });
    for (i, &v) in sweep.values.iter().enumerate() {
        let mut value = base.clone();
        set_parameter(&mut value, &sweep.parameter, v)?;
        let point = FileConfig {
            run: serde_json::from_value(value["run"].take())?,
            kernel: serde_json::from_value(value["kernel"].take())?,
            nonlinearity: serde_json::from_value(value["nonlinearity"].take())?,
            forcing: serde_json::from_value(value["forcing"].take())?,
            diagnostics: serde_json::from_value(value["diagnostics"].take())?,
            ..cfg.clone()
        };
        let dir = out.join(format!("point-{i:03}"));
        fs::create_dir_all(&dir)?;
        let (config, path) = simulate_config(opts, &point, None)
            .with_context(|| format!("grid point {}={v}", sweep.parameter))?;
        diagnose(opts, &point, &config, &path, &dir)?;
        println!("{}={v}: wrote {}", sweep.parameter, dir.display());
    }
    Ok(())
}
