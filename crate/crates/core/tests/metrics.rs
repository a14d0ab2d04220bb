use clqaoa_core::metrics::{approximation_ratios, fit_saturation, required_shots};
use clqaoa_core::oracle::{extremes, ExtremesMode};
use clqaoa_core::rng::rng_from_seed;
use clqaoa_core::{CostMatrix, TspProblem};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ratios_are_invariant_under_scaling(seed in any::<u64>(), pick in 0usize..2) {
        let a = [0.5, 3.0][pick];
        let mut rng = rng_from_seed(seed);
        let base = CostMatrix::from_fn(3, |_, _| rng.gen_range(0.5..10.0)).unwrap();
        let scaled = CostMatrix::from_fn(3, |i, j| a * base.get(i, j)).unwrap();
        let p1 = TspProblem::unconstrained(base).unwrap();
        let p2 = TspProblem::unconstrained(scaled).unwrap();
        let e1 = extremes(&p1, ExtremesMode::Subspace).unwrap();
        let e2 = extremes(&p2, ExtremesMode::Subspace).unwrap();
        let c = rng.gen_range(e1.c_opt..e1.c_worst);
        let d = rng.gen_range(e1.c_opt..e1.c_worst);
        let r1 = approximation_ratios(c, d, &e1);
        let r2 = approximation_ratios(a * c, a * d, &e2);
        prop_assert!((r1.ar_exp - r2.ar_exp).abs() < 1e-9);
        prop_assert!((r1.ar_min - r2.ar_min).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r1.ar_exp));
    }

    #[test]
    fn saturation_fit_shift(a in 0.1f64..0.9, k in 0.2f64..2.0) {
        let pts: Vec<(f64, f64)> = (1..=6).map(|p| (p as f64, 1.0 - a * (-k * p as f64).exp())).collect();
        let f = fit_saturation(&pts).unwrap();
        let shifted: Vec<(f64, f64)> = pts.iter().map(|&(p, ar)| (p + 1.0, ar)).collect();
        let g = fit_saturation(&shifted).unwrap();
        prop_assert!((g.k - f.k).abs() < 1e-6);
        prop_assert!((g.a - f.a * f.k.exp()).abs() < 1e-6 * g.a.max(1.0));
        prop_assert!(f.predict(2.0) > f.predict(1.0));
    }

    #[test]
    fn required_shots_monotone(e in 0.1f64..100.0, v in 0.0f64..100.0, d in 0.01f64..1.0) {
        prop_assert!(required_shots(e, v, d * 2.0).unwrap() <= required_shots(e, v, d).unwrap());
        prop_assert!(required_shots(e * 2.0, v, d).unwrap() <= required_shots(e, v, d).unwrap());
    }
}

#[test]
fn min_ratio_is_one_exactly_at_the_optimum() {
    let p = TspProblem::unconstrained(CostMatrix::from_rows(&[vec![0., 3.], vec![7., 0.]]).unwrap()).unwrap();
    let e = extremes(&p, ExtremesMode::Subspace).unwrap();
    assert_eq!(approximation_ratios(10.0, 3.0, &e).ar_min, 1.0);
    assert!(approximation_ratios(10.0, 7.0, &e).ar_min < 1.0);
}
