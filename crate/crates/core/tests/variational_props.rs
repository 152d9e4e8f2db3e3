use gibbs_qaoa::evolution::CostKind;
use gibbs_qaoa::ising::toy_instance;
use gibbs_qaoa::variational::{
    linear_to_schedule, optimize_from, optimize_qaoa, powell_minimize, tqa_schedule, LinearParams, Objective,
    PowellOptions, QaoaOptions, Scheme,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn tqa_linear_image_is_exact(p in 1usize..=200, dt in 0.01f64..10.0) {
        let lin = linear_to_schedule(&LinearParams::tqa(dt), p).unwrap();
        prop_assert_eq!(lin, tqa_schedule(p, dt).unwrap());
    }

    #[test]
    fn powell_trace_never_rises(
        center in proptest::collection::vec(-3.0f64..3.0, 1..6),
        scale in proptest::collection::vec(0.1f64..10.0, 6),
        start in proptest::collection::vec(-3.0f64..3.0, 6),
    ) {
        let d = center.len();
        let f = |x: &[f64]| {
            let bowl: f64 = x.iter().zip(&center).zip(&scale).map(|((x, c), s)| s * (x - c).powi(2)).sum();
            bowl + 0.3 * (x[0] * 2.0).sin()
        };
        let r = powell_minimize(f, &start[..d], &PowellOptions::default()).unwrap();
        prop_assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
        prop_assert_eq!(r.trace.last().unwrap().1, r.best_value);
        prop_assert!(r.best_value <= f(&start[..d]));
    }
}

#[test]
fn analytic_minima() {
    let quad = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.5 * (x[2] - 3.0).powi(2);
    let r = powell_minimize(quad, &[0.0, 0.0, 0.0], &PowellOptions::default()).unwrap();
    for (x, want) in r.best_params.iter().zip([1.0, -0.5, 3.0]) {
        assert!((x - want).abs() <= 1e-8);
    }

    let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let opts = PowellOptions {
        ftol: 1e-14,
        xtol: 1e-10,
        max_iter: 1000,
        ..PowellOptions::default()
    };
    let r = powell_minimize(rosen, &[-1.2, 1.0], &opts).unwrap();
    assert!((r.best_params[0] - 1.0).abs() <= 1e-5 && (r.best_params[1] - 1.0).abs() <= 1e-5);
    assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
}

#[test]
fn full_nests_linearized() {
    let toy = toy_instance();
    for (kind, p) in [(CostKind::Classical, 4), (CostKind::Sbo { temperature: 1.0 }, 6)] {
        let lin = optimize_qaoa(&toy, kind, Scheme::Linearized, p, &QaoaOptions::default()).unwrap();
        let start = lin.schedule.to_params();
        let full = Objective::new(&toy, kind, Scheme::Full, p).unwrap();
        assert!((full.value(&start).unwrap() - lin.result.best_value).abs() <= 1e-12);
        let warm = optimize_from(&full, &start, &QaoaOptions::default()).unwrap();
        assert!(warm.result.best_value <= lin.result.best_value + 1e-9);
    }
}

#[test]
fn optimizer_traces_on_qaoa() {
    let toy = toy_instance();
    for scheme in [Scheme::Full, Scheme::Linearized] {
        for kind in [CostKind::Classical, CostKind::Sbo { temperature: 2.0 }] {
            let out = optimize_qaoa(&toy, kind, scheme, 3, &QaoaOptions::default()).unwrap();
            let trace = &out.result.trace;
            assert!(trace.windows(2).all(|w| w[1].1 <= w[0].1), "{scheme} {kind:?}");
            let x0 = scheme.initial_params(3, 1.0).unwrap();
            let obj = Objective::new(&toy, kind, scheme, 3).unwrap();
            assert_eq!(trace[0].1, obj.value(&x0).unwrap());
        }
    }
}

#[test]
fn optimization_is_deterministic() {
    let toy = toy_instance();
    let opts = QaoaOptions {
        restarts: 2,
        seed: 7,
        ..QaoaOptions::default()
    };
    let a = optimize_qaoa(&toy, CostKind::Sbo { temperature: 1.0 }, Scheme::Linearized, 5, &opts).unwrap();
    let b = optimize_qaoa(&toy, CostKind::Sbo { temperature: 1.0 }, Scheme::Linearized, 5, &opts).unwrap();
    assert_eq!(a, b);
}
