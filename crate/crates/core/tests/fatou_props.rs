use critfin_core::config::Config;
use critfin_core::dynamics::{certify_superattracting, find_periodic, Classification, Endomorphism};
use critfin_core::fatou::{
    escape_rate_normalized, escape_rate_of_lift, render_slice, sample_orbit, Outcome, SliceSpec, Targets,
};
use critfin_core::geometry::{relative_residual, AlgebraicSet, Component, ProjPoint};
use critfin_core::numeric::{normalize, proj_distance};
use critfin_core::postcritical::classify;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, RngSeed};
use std::sync::OnceLock;

fn pt(cases: u32) -> PtConfig {
    PtConfig { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..PtConfig::default() }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Case {
    f: Endomorphism,
    targets: Targets,
}

fn build(src: &[&str]) -> Case {
    let cfg = Config::default();
    let f = Endomorphism::parse(src).unwrap();
    let mut search = find_periodic(&f, cfg.max_period, &cfg).unwrap();
    search.points = search.points.iter().map(|p| certify_superattracting(&f, p, &cfg).unwrap()).collect();
    let report = classify(&f, f.k().min(2) as u32, &cfg).unwrap();
    let limits: Vec<&AlgebraicSet> = report.orders.iter().filter_map(|o| o.omega.as_ref().map(|om| &om.e)).collect();
    let targets = Targets::from_analysis(&search, &limits, cfg.cluster_tol);
    Case { f, targets }
}

fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        vec![
            build(&["z^2", "w^2", "t^2"]),
            build(&["z^2 - w*t", "w^2", "t^2"]),
            build(&["z^2 - w^2", "w^2"]),
            build(&["(z^2 + w^2)^2", "4*z*w*(z^2 - w^2)"]),
        ]
    })
}

/// Outcome with the numeric details dropped.
fn label(o: &Outcome) -> String {
    match o {
        Outcome::Converged { cycle, .. } => format!("cycle {cycle}"),
        Outcome::AccumulatesNear { component, .. } => format!("near {component}"),
        Outcome::Undecided { .. } => "undecided".into(),
    }
}

fn arb_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect::<Vec<_>>())
        .prop_filter("nonzero", |v: &Vec<Complex64>| v.iter().any(|x| x.norm() > 0.1))
}

fn arb_scalar() -> impl Strategy<Value = Complex64> {
    (0.01f64..100.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

proptest! {
    #![proptest_config(pt(32))]

    #[test]
    fn orbit_verdicts_ignore_the_representative(which in 0usize..4, x in arb_point(3), lambda in arb_scalar()) {
        let case = &cases()[which];
        let x = &x[..case.f.nvars()];
        prop_assume!(x.iter().any(|v| v.norm() > 0.1));
        let cfg = Config::default();
        let y: Vec<Complex64> = x.iter().map(|v| v * lambda).collect();
        let a = sample_orbit(&case.f, &ProjPoint::from_complex(x), &case.targets, &cfg);
        let b = sample_orbit(&case.f, &ProjPoint::from_complex(&y), &case.targets, &cfg);
        prop_assert_eq!(label(&a.outcome), label(&b.outcome));
    }

    #[test]
    fn escape_rate_shifts_by_log_of_scalar(which in 0usize..4, x in arb_point(3), lambda in arb_scalar(), n in 1u32..30) {
        let f = &cases()[which].f;
        let x = &x[..f.nvars()];
        prop_assume!(x.iter().any(|v| v.norm() > 0.1));
        let y: Vec<Complex64> = x.iter().map(|v| v * lambda).collect();
        let shift = escape_rate_of_lift(f, &y, n) - escape_rate_of_lift(f, x, n);
        prop_assert!((shift - lambda.norm().ln()).abs() < 1e-12, "shift {shift} vs {}", lambda.norm().ln());
        let gx = escape_rate_normalized(f, &ProjPoint::from_complex(x), n);
        let gy = escape_rate_normalized(f, &ProjPoint::from_complex(&y), n);
        prop_assert!((gx - gy).abs() < 1e-12);
    }

    #[test]
    fn lattes_orbits_never_converge_to_attracting_cycles(x in arb_point(2)) {
        let case = &cases()[3];
        let v = sample_orbit(&case.f, &ProjPoint::from_complex(&x), &case.targets, &Config::default());
        if let Outcome::Converged { cycle, .. } = v.outcome {
            let class = case.targets.cycles[cycle].classification;
            prop_assert!(
                !matches!(class, Some(Classification::Attracting)) && !class.is_some_and(Classification::is_superattracting),
                "converged to {:?}", class
            );
        }
    }

    #[test]
    fn converged_orbits_on_the_nilpotent_map_reach_superattracting_cycles(x in arb_point(3)) {
        let case = &cases()[1];
        let v = sample_orbit(&case.f, &ProjPoint::from_complex(&x), &case.targets, &Config::default());
        if let Outcome::Converged { cycle, .. } = v.outcome {
            prop_assert!(case.targets.cycles[cycle].is_superattracting());
        }
    }

    /// Orbits that do not converge end up within 1e-3 of a limit component.
    /// Starts on invariant lines with unimodular ratios never converge, so
    /// they exercise the accumulation branch.
    #[test]
    fn non_converged_orbits_accumulate_on_limit_sets(
        which in 0usize..2,
        x in arb_point(3),
        theta in 0.0f64..std::f64::consts::TAU,
        on_line in any::<bool>(),
    ) {
        let case = &cases()[which];
        let start = if on_line { vec![Complex64::from_polar(1.0, theta), c(1.0, 0.0), c(0.0, 0.0)] } else { x };
        let cfg = Config::default();
        let v = sample_orbit(&case.f, &ProjPoint::from_complex(&start), &case.targets, &cfg);
        if matches!(v.outcome, Outcome::Converged { .. }) {
            return Ok(());
        }
        // independent recomputation of the tail distance
        let mut y = normalize(&start);
        let mut worst: f64 = 0.0;
        for it in 0..cfg.max_iter {
            y = normalize(&case.f.apply_complex(&y));
            if it + 50 >= cfg.max_iter {
                let d = case.targets.components.iter().map(|comp| match comp {
                    Component::Hypersurface(h) => relative_residual(h, &y),
                    Component::Point(p) => proj_distance(&normalize(&p.to_complex()), &y),
                }).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        prop_assert!(worst < 1e-3, "tail distance {worst:e} for {:?}", v.outcome);
        prop_assert!(matches!(v.outcome, Outcome::AccumulatesNear { .. }), "{:?}", v.outcome);
    }
}

proptest! {
    #![proptest_config(pt(6))]

    #[test]
    fn renders_are_byte_identical(which in 0usize..4, cx in -1.0f64..1.0, cy in -1.0f64..1.0, extent in 0.5f64..3.0) {
        let case = &cases()[which];
        let mut spec = SliceSpec::default_for(case.f.k(), 20, 16);
        spec.center = (cx, cy);
        spec.extent = extent;
        let cfg = Config::default();
        let a = render_slice(&case.f, &spec, &case.targets, &cfg).unwrap().to_ppm();
        let b = render_slice(&case.f, &spec, &case.targets, &cfg).unwrap().to_ppm();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| render_slice(&case.f, &spec, &case.targets, &cfg).unwrap().to_ppm());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &serial);
        prop_assert_eq!(a.len(), "P6\n20 16\n255\n".len() + 20 * 16 * 3);
    }
}
