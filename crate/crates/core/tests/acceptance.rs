//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances and runtime budgets are pinned
//! below; statistics are computed directly from the engine and diagnostics,
//! independently of the theorem harness (except for the suite-level checks).

use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volterra_core::diagnostics::{
    check_pathwise, estimate_lambda2, ladder_growth_exponent, phi_time_average, running_max_abs,
    running_signed_max, tail_sup_ratio, ConvexWeightSpec, Regime, Side, SupKind,
    DEFAULT_TAIL_FRACTION,
};
use volterra_core::forcing::ForcingSequence;
use volterra_core::io::{write_report, Metadata};
use volterra_core::seqcore::{KernelSpec, NonlinearitySpec, RealSeq, ScalerSpec};
use volterra_core::theorems::{
    default_suite, median, run_suite, Criterion, Rule, GROWTH_EXPONENT_THRESHOLD,
};
use volterra_core::{generate, simulate, Config, Error, ForcingSpec, SolutionPath, SolverMode};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn geometric(c: f64, rho: f64) -> KernelSpec<f64> {
    KernelSpec::geometric(c, rho).unwrap()
}

fn power(alpha: f64) -> NonlinearitySpec<f64> {
    NonlinearitySpec::signed_power(alpha).unwrap()
}

fn run(kernel: &KernelSpec<f64>, f: &NonlinearitySpec<f64>, h: ForcingSequence<f64>, xi: f64) -> SolutionPath {
    simulate(&Config::new(kernel.clone(), f.clone(), h, xi)).unwrap()
}

fn at(m: &volterra_core::diagnostics::MaxTrack<f64>, n: usize) -> f64 {
    m.at(n).unwrap()
}

// ---- 1 ----------------------------------------------------------------

const ORACLE_CONFIGS: usize = 200;
const ORACLE_MAX_N: usize = 2000;
const ORACLE_REL_TOL: f64 = 1e-9;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
}

fn engine_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..ORACLE_CONFIGS {
        let kernel = match rng.next_u64() % 3 {
            0 => geometric(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -0.95, 0.95)),
            1 => {
                let len = (rng.next_u64() % 60) as usize;
                KernelSpec::finite((0..len).map(|_| uniform(&mut rng, -1.0, 1.0)).collect()).unwrap()
            }
            _ => KernelSpec::polynomial(uniform(&mut rng, 0.1, 2.0), uniform(&mut rng, 1.5, 4.0)).unwrap(),
        };
        let f = if rng.next_u64() % 4 == 0 {
            NonlinearitySpec::bounded(uniform(&mut rng, 0.1, 5.0)).unwrap()
        } else {
            power(uniform(&mut rng, 0.05, 0.95))
        };
        let spec = match rng.next_u64() % 4 {
            0 => ForcingSpec::GaussianIid { sigma: uniform(&mut rng, 0.1, 3.0) },
            1 => ForcingSpec::HeavytailIid { alpha: uniform(&mut rng, 1.1, 3.0) },
            2 => ForcingSpec::MonotonePower { mu: uniform(&mut rng, 0.1, 1.5) },
            _ => ForcingSpec::AlternatingPower {
                mu_plus: uniform(&mut rng, 0.0, 1.3),
                mu_minus: uniform(&mut rng, 0.0, 1.3),
                ratio: uniform(&mut rng, 0.1, 3.0),
            },
        };
        let n = 1 + (rng.next_u64() as usize) % ORACLE_MAX_N;
        let h = generate::<f64>(&spec, n, rng.next_u64()).unwrap();
        let xi = uniform(&mut rng, -3.0, 3.0);
        let auto = simulate(&Config::new(kernel.clone(), f.clone(), h.clone(), xi)).unwrap();
        let reference = Config::new(kernel, f, h, xi).with_solver(SolverMode::Reference);
        let r = simulate(&reference).unwrap();
        let d = scaled_deviation(&auto, &r);
        worst = worst.max(d);
        if d > ORACLE_REL_TOL {
            // conditioning of the equation itself: reference mode against
            // reference mode with every forcing value moved by one ulp
            let nudged = ForcingSequence::from_values(
                reference.forcing.values.values().iter().map(|v| v.next_up()).collect(),
            )
            .unwrap();
            let shifted = simulate(&Config { forcing: nudged, ..reference.clone() }).unwrap();
            failures.push(format!(
                "{:?} with {:?}, {spec:?}, N = {n}: deviation {d:.1e}, one-ulp forcing shift alone gives {:.1e}",
                reference.kernel.shape,
                reference.nonlinearity.shape,
                scaled_deviation(&shifted, &r)
            ));
        }
    }
    let mut detail = format!(
        "{ORACLE_CONFIGS} configs, N <= {ORACLE_MAX_N}: {} disagree, worst scaled deviation {worst:.1e} (tol {ORACLE_REL_TOL:e})",
        failures.len()
    );
    for f in &failures {
        detail.push_str("; ");
        detail.push_str(f);
    }
    outcome(failures.is_empty(), detail)
}

fn scaled_deviation(a: &SolutionPath, b: &SolutionPath) -> f64 {
    a.x.values()
        .iter()
        .zip(b.x.values())
        .map(|(p, q)| (p - q).abs() / q.abs().max(1.0))
        .fold(0.0, f64::max)
}

// ---- 2 ----------------------------------------------------------------

const PATHWISE_EPS: [f64; 3] = [0.5, 0.1, 0.01];

fn pathwise_suite() -> Outcome {
    let (mut paths, mut points, mut violations, mut overflowed) = (0, 0usize, 0usize, 0);
    for s in default_suite() {
        let seeds = match s.seed_list() {
            v if v.is_empty() => vec![0],
            v => v,
        };
        for seed in seeds {
            let p = match s.realize(seed) {
                Ok((_, p)) => p,
                Err(Error::Overflow { .. }) => {
                    overflowed += 1;
                    continue;
                }
                Err(e) => panic!("{}: {e}", s.name),
            };
            paths += 1;
            for eps in PATHWISE_EPS {
                for c in check_pathwise(&p, &s.kernel, &s.nonlinearity, eps).unwrap() {
                    points += c.checked;
                    violations += c.violations;
                }
            }
        }
    }
    outcome(
        violations == 0 && overflowed == 0,
        format!("{paths} shipped paths, {points} inequality evaluations, {violations} violations, {overflowed} paths overflowed"),
    )
}

// ---- 3 ----------------------------------------------------------------

const MAXRATIO_TOL: f64 = 0.05;
const LADDER: [usize; 3] = [1_000, 10_000, 100_000];

fn growth_maxima() -> Outcome {
    let (k, f) = (geometric(1.0, 0.5), power(0.3));
    let spec = ForcingSpec::HeavytailIid { alpha: 1.5 };
    let mut ratio = vec![Vec::new(); LADDER.len()];
    let mut coupling = vec![Vec::new(); 4];
    for seed in 1..=5u64 {
        let h = generate::<f64>(&spec, 100_000, seed).unwrap();
        let p = run(&k, &f, h, 0.0);
        let xs = running_max_abs(&p.x).unwrap();
        let hs = running_max_abs(&p.h).unwrap();
        for (i, &n) in LADDER.iter().enumerate() {
            ratio[i].push((at(&xs, n) / at(&hs, n) - 1.0).abs());
        }
        let n = 100_000;
        let (th, tx) = (hs.argmax_at(n).unwrap(), xs.argmax_at(n).unwrap());
        let ax = |j: usize| p.x.get(j).unwrap().abs();
        let ah = |j: usize| p.h.get(j).unwrap().abs();
        let r = [ax(th) / ah(th), ax(tx) / ax(th), ax(tx) / ah(tx), ah(tx) / ah(th)];
        for (c, v) in coupling.iter_mut().zip(r) {
            c.push((v - 1.0).abs());
        }
    }
    let ladder: Vec<f64> = ratio.iter().map(|v| median(v)).collect();
    let ladder_ok = Criterion::new("ratio", Rule::Converges, MAXRATIO_TOL, ladder.clone()).passed;
    let coupling: Vec<f64> = coupling.iter().map(|v| median(v)).collect();
    let coupling_ok = coupling.iter().all(|d| *d <= MAXRATIO_TOL);
    outcome(
        ladder_ok && coupling_ok,
        format!("median |x*/H* - 1| along ladder {ladder:?}; argmax ratio deviations {coupling:?} (tol {MAXRATIO_TOL})"),
    )
}

// ---- 4 ----------------------------------------------------------------

const GROWTH_TOL: f64 = 0.01;

fn growth() -> Outcome {
    let n = 100_000;
    let h = generate::<f64>(&ForcingSpec::MonotonePower { mu: 1.2 }, n, 0).unwrap();
    let p = run(&geometric(1.0, 0.5), &power(0.5), h, 0.0);
    let d = (p.x.get(n).unwrap() / p.h.get(n).unwrap() - 1.0).abs();
    outcome(d <= GROWTH_TOL, format!("|x(N)/H(N) - 1| = {d:.3e} at N = {n} (tol {GROWTH_TOL})"))
}

// ---- 5 ----------------------------------------------------------------

const MODULATED_TOL: f64 = 1e-3;

fn modulated() -> Outcome {
    let (a, n) = (0.05, 2000);
    let pi = vec![1.0, 1.5, 2.0, 1.25, 1.75, 1.1, 1.9];
    let h = generate::<f64>(&ForcingSpec::PeriodicExponential { a, pi: pi.clone() }, n, 0).unwrap();
    let p = run(&geometric(1.0, 0.5), &power(0.5), h, 0.0);
    let sup = (n - 199..=n)
        .map(|m| (p.x.get(m).unwrap() / (a * m as f64).exp() - pi[m % 7]).abs())
        .fold(0.0, f64::max);
    outcome(sup <= MODULATED_TOL, format!("sup over final 200 indices = {sup:.3e} (tol {MODULATED_TOL:e})"))
}

// ---- 6 ----------------------------------------------------------------

const RHO_BAND: [f64; 2] = [0.85, 1.1];

fn gaussian_limsup() -> Outcome {
    let (k, f) = (geometric(0.2, 0.5), power(0.5));
    let n = 1_000_000;
    let rhos: Vec<f64> = (1..=20u64)
        .map(|seed| {
            let h = generate::<f64>(&ForcingSpec::GaussianIid { sigma: 1.0 }, n, seed).unwrap();
            let p = run(&k, &f, h, 0.0);
            tail_sup_ratio(&p.x, &ScalerSpec::SqrtLog, DEFAULT_TAIL_FRACTION, SupKind::Abs).unwrap()
        })
        .collect();
    let m = median(&rhos);
    outcome(
        (RHO_BAND[0]..=RHO_BAND[1]).contains(&m),
        format!("median tail sup |x|/sqrt(2 log n) over 20 seeds = {m:.4} (band {RHO_BAND:?})"),
    )
}

// ---- 7 ----------------------------------------------------------------

const CONSTRUCTED_GROWTH_TOL: f64 = 0.05;
const LAMBDA2_REL_TOL: f64 = 0.1;
const BAND_SLACK: f64 = 0.1;

fn constructed(mu_minus: f64, n: usize) -> (RealSeq<f64>, SolutionPath) {
    let k = geometric(1.0, 0.5);
    let spec = ForcingSpec::ConstructedAlternating { mu_plus: 1.0, mu_minus, alpha: 0.5, kernel: k.clone() };
    let y = spec.constructed_path(n).unwrap();
    let h = generate::<f64>(&spec, n, 0).unwrap();
    (y, run(&k, &power(0.5), h, 1.0))
}

fn constructed_example() -> Outcome {
    let n = 100_000;
    let f = power(0.5);
    let l1 = geometric(1.0, 0.5).l1_norm();

    let (y, p) = constructed(0.7, n);
    let differing = (0..=n).filter(|&m| p.x.get(m) != y.get(m)).count();
    let worst_ulps = (0..=n)
        .map(|m| {
            let (a, b) = (p.x.get(m).unwrap(), y.get(m).unwrap());
            ((a - b).abs() / (b.abs().next_up() - b.abs())).round() as u64
        })
        .max()
        .unwrap();
    let exact = differing == 0;
    let regime = estimate_lambda2(&p.h, &f).unwrap().regime;
    let infinite = regime == Regime::Infinite;
    let xm = at(&running_signed_max(&p.x, Side::Minus).unwrap(), n);
    let growth = xm / (n as f64).powf(0.7);
    let growth_ok = (growth - 1.0).abs() <= CONSTRUCTED_GROWTH_TOL;

    let (_, p2) = constructed(0.2, n);
    let l2 = estimate_lambda2(&p2.h, &f).unwrap().regime.finite();
    let l2_ok = l2.is_some_and(|v| (v - 4.0 / 3.0).abs() <= LAMBDA2_REL_TOL * 4.0 / 3.0);
    let band = l1 / (4.0 / 3.0) + BAND_SLACK;
    let r = at(&running_signed_max(&p2.x, Side::Minus).unwrap(), n)
        / at(&running_signed_max(&p2.h, Side::Minus).unwrap(), n);
    let band_ok = (r - 1.0).abs() <= band;

    outcome(
        exact && infinite && growth_ok && l2_ok && band_ok,
        format!(
            "mu-=0.7: bit-exact x=y {} ({differing} of {} indices differ, worst {worst_ulps} ulp), lambda2 regime {regime:?}, x*-(N)/N^0.7 = {growth:.4}; \
             mu-=0.2: lambda2 = {l2:.4?} (4/3 +- {LAMBDA2_REL_TOL:.0e} rel), x*-/H*- = {r:.4} (band 1 +- {band:.2})",
            if exact { "holds" } else { "FAILS" },
            n + 1,
        ),
    )
}

// ---- 8 ----------------------------------------------------------------

const MOMENT_LADDER: [usize; 3] = [10_000, 100_000, 1_000_000];
const PARETO_MEAN_TOL: f64 = 0.1;

/// Median over seeds of the per-decade growth exponent of the weighted time
/// averages of `x` and `H`, plus the median final average of `H`.
fn moment_growth(k: &KernelSpec<f64>, spec: &ForcingSpec, w: ConvexWeightSpec<f64>, seeds: u64) -> (f64, f64, f64) {
    let f = power(0.5);
    let n = *MOMENT_LADDER.last().unwrap();
    let (mut gx, mut gh, mut ah) = (Vec::new(), Vec::new(), Vec::new());
    let growth = |seq: &RealSeq<f64>| match phi_time_average(seq, &w) {
        Ok(a) => {
            let v: Vec<f64> = MOMENT_LADDER.iter().map(|&m| a.get(m).unwrap()).collect();
            (ladder_growth_exponent(&MOMENT_LADDER, &v).unwrap(), a.get(n).unwrap())
        }
        Err(Error::Overflow { .. }) => (f64::INFINITY, f64::INFINITY),
        Err(e) => panic!("{e}"),
    };
    for seed in 1..=seeds {
        let h = generate::<f64>(spec, n, seed).unwrap();
        let x_growth = match simulate(&Config::new(k.clone(), f.clone(), h.clone(), 0.0)) {
            Ok(p) => growth(&p.x).0,
            Err(Error::Overflow { .. }) => f64::INFINITY,
            Err(e) => panic!("{e}"),
        };
        let (g, a) = growth(&h.values);
        gx.push(x_growth);
        gh.push(g);
        ah.push(a);
    }
    (median(&gx), median(&gh), median(&ah))
}

fn moment_dichotomies() -> Outcome {
    let th = GROWTH_EXPONENT_THRESHOLD;
    let gauss = ForcingSpec::GaussianIid { sigma: 1.0 };
    let heavy = ForcingSpec::HeavytailIid { alpha: 2.0 };
    let calm = geometric(0.2, 0.5);
    let k = geometric(1.0, 0.5);
    let (g3x, g3h, _) = moment_growth(&calm, &gauss, ConvexWeightSpec::gaussian_exp(0.3).unwrap(), 5);
    let (g7x, g7h, _) = moment_growth(&calm, &gauss, ConvexWeightSpec::gaussian_exp(0.7).unwrap(), 10);
    let (p1x, _, mean) = moment_growth(&k, &heavy, ConvexWeightSpec::power(1.0).unwrap(), 5);
    let (p25x, p25h, _) = moment_growth(&k, &heavy, ConvexWeightSpec::power(2.5).unwrap(), 10);
    let ok = g3x < th && g3h < th && g7x >= th && g7h >= th && p1x < th && (mean / 2.0 - 1.0).abs() <= PARETO_MEAN_TOL
        && p25x >= th && p25h >= th;
    outcome(
        ok,
        format!(
            "growth per decade (threshold {th}): gaussian a=0.3 x {g3x:.3} H {g3h:.3}, a=0.7 x {g7x:.3} H {g7h:.3}; \
             heavytail p=1 x {p1x:.3} with A_H(N) = {mean:.4} (2 +- {PARETO_MEAN_TOL:.0e} rel), p=2.5 x {p25x:.3} H {p25h:.3}"
        ),
    )
}

// ---- 9 ----------------------------------------------------------------

const LOG_EXPONENT_TOL: f64 = 0.1;

fn log_exponent() -> Outcome {
    let n = 1_000_000;
    let (k, f) = (geometric(1.0, 0.5), power(0.5));
    let values: Vec<f64> = (1..=5u64)
        .map(|seed| {
            let h = generate::<f64>(&ForcingSpec::HeavytailIid { alpha: 2.0 }, n, seed).unwrap();
            let p = run(&k, &f, h, 0.0);
            (n / 10..=n)
                .filter_map(|m| {
                    let v = p.x.get(m).unwrap().abs();
                    (v > 0.0).then(|| v.ln() / (m as f64).ln())
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let m = median(&values);
    outcome(
        (m - 0.5).abs() <= LOG_EXPONENT_TOL,
        format!("median final-decade sup log|x|/log n = {m:.4} (0.5 +- {LOG_EXPONENT_TOL})"),
    )
}

// ---- 10 ---------------------------------------------------------------

fn reproducibility() -> Outcome {
    let render = || {
        let suite = default_suite();
        let report = run_suite(&suite).unwrap();
        let mut buf = Vec::new();
        write_report(&mut buf, &Metadata::new("acceptance"), &report.checks).unwrap();
        (buf, report.all_passed())
    };
    let (a, pass_a) = render();
    let (b, _) = render();
    outcome(
        a == b,
        format!("two default-suite runs: {} bytes each, identical = {}, all checks pass = {pass_a}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "engine oracle equivalence", Duration::from_secs(30), engine_oracle),
        (2, "pathwise inequality suite", Duration::from_secs(60), pathwise_suite),
        (3, "max ratio and argmax coupling", Duration::from_secs(60), growth_maxima),
        (4, "growth transfer", Duration::from_secs(10), growth),
        (5, "modulated exponential growth", Duration::from_secs(1), modulated),
        (6, "gaussian limsup scaling", Duration::from_secs(300), gaussian_limsup),
        (7, "constructed alternating example", Duration::from_secs(30), constructed_example),
        (8, "moment dichotomies", Duration::from_secs(180), moment_dichotomies),
        (9, "heavytail log exponent", Duration::from_secs(180), log_exponent),
        (10, "reproducible reports", Duration::from_secs(600), reproducibility),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let t = Instant::now();
        let o = check();
        let took = t.elapsed();
        let ok = o.passed && took <= budget;
        println!(
            "criterion {id:>2} {} {name}: {} [{:.1}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !ok {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
