mod common;

use clqaoa_core::oracle::{
    enumerate_path_tsp, enumerate_tsp, exact_path_tsp, exact_tsp, extremes, ExtremesMode, Witness,
};
use clqaoa_core::problem::{bitstring_cost, tour_cost};
use clqaoa_core::tour::route_cost;
use clqaoa_core::{CostMatrix, TspProblem};
use common::*;
use proptest::prelude::*;

#[test]
fn held_karp_equals_enumeration() {
    for n in 3..=8usize {
        for seed in 0..5 {
            let m = random_matrix(n, 1000 * n as u64 + seed);
            for closed in [true, false] {
                assert_eq!(exact_tsp(&m, closed).unwrap(), enumerate_tsp(&m, closed).unwrap(), "n={n} closed={closed}");
            }
            let (e, x) = (seed as usize % n, (seed as usize + 1 + n / 2) % n);
            assert_eq!(exact_path_tsp(&m, e, x).unwrap(), enumerate_path_tsp(&m, e, x).unwrap());
        }
    }
}

#[test]
fn start_city_does_not_matter_for_cycles() {
    for n in 3..=7usize {
        let m = random_matrix(n, 77 + n as u64);
        let (best, _) = exact_tsp(&m, true).unwrap();
        for s in 0..n {
            let cities: Vec<usize> = (0..n).map(|k| (k + s) % n).collect();
            let rotated = m.submatrix(&cities).unwrap();
            assert!((exact_tsp(&rotated, true).unwrap().0 - best).abs() < 1e-9);
        }
    }
}

#[test]
fn subspace_optimum_is_open_path_optimum() {
    for n in 3..=6usize {
        let m = random_matrix(n, n as u64);
        let p = TspProblem::unconstrained(m.clone()).unwrap();
        let e = extremes(&p, ExtremesMode::Subspace).unwrap();
        let (open, tour) = exact_tsp(&m, false).unwrap();
        assert!((e.c_opt - open).abs() < 1e-9);
        assert_eq!(e.opt_witness, Witness::Sequence(clqaoa_core::SequenceState::new(tour)));
    }
}

#[test]
fn full_and_subspace_optima_agree() {
    for n in 3..=4usize {
        for (name, c) in constraint_families(n, 3) {
            let p = TspProblem::new(random_matrix(n, 40 + n as u64), c).unwrap();
            let f = extremes(&p, ExtremesMode::Full).unwrap();
            let s = extremes(&p, ExtremesMode::Subspace).unwrap();
            assert!((f.c_opt - s.c_opt).abs() < 1e-9, "{name} n={n}");
            assert!(f.c_worst >= s.c_worst);
            let Witness::Bits(b) = &f.opt_witness else { panic!() };
            assert!((bitstring_cost(&p, b, true).unwrap() - f.c_opt).abs() < 1e-9);
            let Witness::Sequence(q) = &s.opt_witness else { panic!() };
            assert!((tour_cost(&p, &q.seq) - s.c_opt).abs() < 1e-9);
        }
    }
}

#[test]
fn two_city_worked_example() {
    let m = CostMatrix::from_rows(&[vec![0., 3.], vec![7., 0.]]).unwrap();
    let p = TspProblem::unconstrained(m).unwrap();
    let e = extremes(&p, ExtremesMode::Subspace).unwrap();
    assert_eq!((e.c_opt, e.c_worst), (3.0, 28.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_tours_are_optimal_permutations(seed in any::<u64>(), n in 2usize..=7) {
        let m = random_matrix(n, seed);
        let (c, t) = exact_tsp(&m, true).unwrap();
        prop_assert_eq!(t[0], 0);
        prop_assert!((route_cost(&m, &t, true).unwrap() - c).abs() < 1e-12);
        prop_assert!((enumerate_tsp(&m, true).unwrap().0 - c).abs() < 1e-9);
    }
}
