use volterra_core::seqcore::{KernelSpec, NonlinearitySpec, RealSeq};
use volterra_core::{
    generate, recover_forcing, simulate, volterra_term, Config, ForcingSpec, SolverMode,
};
use volterra_core::forcing::ForcingSequence;

fn f() -> NonlinearitySpec<f64> {
    NonlinearitySpec::signed_power(0.5).unwrap()
}

fn k() -> KernelSpec<f64> {
    KernelSpec::geometric(1.0, 0.5).unwrap()
}

fn y_path(n: usize, mu_minus: f64) -> RealSeq<f64> {
    let spec = ForcingSpec::ConstructedAlternating { mu_plus: 1.0, mu_minus, alpha: 0.5, kernel: k() };
    spec.constructed_path(n).unwrap()
}

/// Brute-force oracle: is there a double `h` within 16 ulps of `y - s` with `h + s == y`?
fn has_preimage(y: f64, s: f64) -> bool {
    let mut h = y - s;
    for _ in 0..16 {
        h = h.next_down();
    }
    (0..33).any(|_| {
        let hit = h + s == y;
        h = h.next_up();
        hit
    })
}

#[test]
fn recovered_forcing_is_exact_wherever_a_preimage_exists() {
    for mu_minus in [0.7, 0.2] {
        let n = 5000;
        let y = y_path(n, mu_minus);
        let h = recover_forcing(&y, &k(), &f(), SolverMode::Reference).unwrap();
        let mut missing = 0;
        for m in 1..=n {
            let s = volterra_term(&y.prefix(m - 1), &k(), &f(), m - 1).unwrap();
            let target = y.get(m).unwrap();
            if h.get(m).unwrap() + s != target {
                assert!(!has_preimage(target, s), "mu_minus={mu_minus}, n={m}: preimage exists but was missed");
                missing += 1;
            }
        }
        // a handful of indices genuinely have no preimage in double precision
        assert!(missing < n / 2, "{missing}");
    }
}

#[test]
fn constructed_path_is_reproduced_to_rounding() {
    for mu_minus in [0.7, 0.2] {
        let n = 20_000;
        let y = y_path(n, mu_minus);
        let h = recover_forcing(&y, &k(), &f(), SolverMode::Reference).unwrap();
        let forcing = ForcingSequence::from_values(h.into_values()).unwrap();
        let cfg = Config::new(k(), f(), forcing, 1.0).with_solver(SolverMode::Reference);
        let x = simulate(&cfg).unwrap().x;
        for m in 0..=n {
            let (a, b) = (x.get(m).unwrap(), y.get(m).unwrap());
            assert!((a - b).abs() <= 1e-13 * b.abs(), "mu_minus={mu_minus}, n={m}: {a} vs {b}");
        }
    }
}

#[test]
fn simulate_recover_simulate_is_identity() {
    for (seed, spec) in [
        (1, ForcingSpec::GaussianIid { sigma: 1.0 }),
        (2, ForcingSpec::HeavytailIid { alpha: 1.5 }),
        (0, ForcingSpec::MonotonePower { mu: 1.2 }),
    ] {
        for mode in [SolverMode::Reference, SolverMode::Auto] {
            let h = generate::<f64>(&spec, 3000, seed).unwrap();
            let cfg = Config::new(k(), f(), h, 0.25).with_solver(mode);
            let x = simulate(&cfg).unwrap().x;
            let back = recover_forcing(&x, &k(), &f(), mode).unwrap();
            let cfg2 = Config::new(k(), f(), ForcingSequence::from_values(back.into_values()).unwrap(), 0.25)
                .with_solver(mode);
            let x2 = simulate(&cfg2).unwrap().x;
            assert_eq!(x.values(), x2.values(), "{spec:?} {mode:?}");
        }
    }
}
