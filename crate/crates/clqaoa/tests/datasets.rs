use std::path::Path;

use clqaoa::formats::{
    constraints_to_json, matrix_to_csv, matrix_to_json, parse_constraints, parse_matrix_csv, parse_matrix_json,
    read_matrix, write_matrix,
};
use clqaoa::graph::{graph_to_matrix, Edge, RankedNodes, WeightedDigraph};
use clqaoa_core::instances::{gen_constraints, gen_synthetic, sample_top_subset, ConstraintKind};
use clqaoa_core::oracle::next_permutation;
use clqaoa_core::rng::{rng_from_seed, stable_hash};
use clqaoa_core::{ConstraintSet, CostMatrix};
use proptest::prelude::*;
use rand::Rng;

fn bits(m: &CostMatrix) -> Vec<u64> {
    m.as_slice().iter().map(|x| x.to_bits()).collect()
}

/// A ring through every node plus random chords, so every pair is connected.
fn random_graph(nodes: usize, chords: usize, seed: u64) -> WeightedDigraph {
    let mut rng = rng_from_seed(seed);
    let mut g = WeightedDigraph::new();
    let mut add = |u: usize, v: usize, rng: &mut clqaoa_core::rng::Rng| {
        g.add_edge(Edge {
            u: format!("n{u}"),
            v: format!("n{v}"),
            length_m: rng.gen_range(1.0..2000.0),
            maxspeed_kmh: rng.gen_range(5.0..130.0),
        })
        .unwrap();
    };
    for u in 0..nodes {
        add(u, (u + 1) % nodes, &mut rng);
    }
    for _ in 0..chords {
        let u = rng.gen_range(0..nodes);
        let v = rng.gen_range(0..nodes);
        if u != v {
            add(u, v, &mut rng);
        }
    }
    g
}

fn has_zero_violation_permutation(c: &ConstraintSet, n: usize) -> bool {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if c.violations(&perm) == 0 {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

#[test]
fn synthetic_matrices_are_asymmetric() {
    let asymmetric = (0..1000u64)
        .filter(|&s| {
            let m = gen_synthetic(10, &mut rng_from_seed(stable_hash(s, &[10]))).unwrap();
            (0..10).any(|i| (0..10).any(|j| m.get(i, j) != m.get(j, i)))
        })
        .count();
    assert!(asymmetric >= 999, "{asymmetric}");
}

#[test]
fn top_subset_is_uniform_over_the_top_ranks() {
    let ranked = RankedNodes::new((0..30).map(|i| format!("s{i}")).collect()).unwrap();
    let mut counts = [0usize; 30];
    let mut rng = rng_from_seed(11);
    let draws = 10_000;
    for _ in 0..draws {
        for id in sample_top_subset(ranked.as_slice(), 5, &mut rng).unwrap() {
            counts[id[1..].parse::<usize>().unwrap()] += 1;
        }
    }
    for (rank, &c) in counts.iter().enumerate() {
        let f = c as f64 / draws as f64;
        if rank < 10 {
            assert!((f - 0.5).abs() <= 0.05, "rank {rank}: {f}");
        } else {
            assert_eq!(c, 0, "rank {rank}");
        }
    }
    let short = RankedNodes::new((0..5).map(|i| format!("s{i}")).collect()).unwrap();
    assert!(sample_top_subset(short.as_slice(), 5, &mut rng).is_err());
}

#[test]
fn generated_constraints_admit_a_feasible_tour() {
    for kind in ConstraintKind::ALL {
        for n in 3..=7 {
            for seed in 0..10u64 {
                let c = gen_constraints(kind, n, &mut rng_from_seed(stable_hash(seed, &[n as u64]))).unwrap();
                assert!(has_zero_violation_permutation(&c, n), "{kind:?} n={n} seed={seed}");
            }
        }
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_synthetic(6, &mut rng_from_seed(1)).unwrap();
    for name in ["m.json", "m.csv"] {
        let p = dir.path().join(name);
        write_matrix(&p, &m).unwrap();
        assert_eq!(bits(&read_matrix(&p).unwrap()), bits(&m));
    }
    let g = random_graph(8, 10, 2);
    let p = dir.path().join("g.csv");
    g.write(&p).unwrap();
    assert_eq!(WeightedDigraph::read(&p).unwrap(), g);
}

#[test]
fn graph_matrix_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let gp = dir.path().join("g.csv");
    std::fs::write(&gp, "u,v,length_m,maxspeed_kmh\na,b,100,50\nb,a,100,25\nb,c,360,36\nc,a,72,36\n").unwrap();
    let rp = dir.path().join("r.txt");
    std::fs::write(&rp, "c\na\nb\n").unwrap();
    let g = WeightedDigraph::read(&gp).unwrap();
    let r = RankedNodes::read(&rp).unwrap();
    let m = graph_to_matrix(&g, r.as_slice()).unwrap();
    // c -> a 7.2 s, a -> b 7.2 s, b -> a 14.4 s, b -> c 36 s.
    let expect = [[0.0, 7.2, 14.4], [43.2, 0.0, 7.2], [36.0, 14.4, 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((m.get(i, j) - expect[i][j]).abs() < 1e-9, "({i},{j}) = {}", m.get(i, j));
        }
    }
    assert!(m.get(1, 0) != m.get(0, 1));
}

#[test]
fn malformed_files_carry_context() {
    let p = Path::new("bad.json");
    let e = parse_matrix_json("{\"n\": 2, \"matrix\": [[0, 1], [2, 0]], \"extra\": 1}", p).unwrap_err();
    assert!(e.to_string().starts_with("bad.json:1:"), "{e}");
    let e = parse_constraints("{\"time\": [[0, 0], [0]]}", 2, p).unwrap_err();
    assert!(e.to_string().contains("time[1]"), "{e}");
    let e = parse_matrix_csv("0,1\n2\n", Path::new("bad.csv")).unwrap_err();
    assert!(e.to_string().starts_with("bad.csv:2"), "{e}");
}

proptest! {
    #[test]
    fn triangle_property(seed in any::<u64>(), nodes in 3usize..12, chords in 0usize..30) {
        let g = random_graph(nodes, chords, seed);
        let ids: Vec<String> = g.nodes().to_vec();
        let m = graph_to_matrix(&g, &ids).unwrap();
        let n = ids.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != k {
                        prop_assert!(m.get(i, k) <= m.get(i, j) + m.get(j, k) + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn subset_matrix_matches_full_matrix(seed in any::<u64>(), nodes in 4usize..10) {
        let g = random_graph(nodes, 8, seed);
        let all = graph_to_matrix(&g, g.nodes()).unwrap();
        let pick: Vec<usize> = (0..nodes).step_by(2).collect();
        let ids: Vec<String> = pick.iter().map(|&i| g.nodes()[i].clone()).collect();
        let sub = graph_to_matrix(&g, &ids).unwrap();
        for (a, &i) in pick.iter().enumerate() {
            for (b, &j) in pick.iter().enumerate() {
                prop_assert_eq!(sub.get(a, b), all.get(i, j));
            }
        }
    }

    #[test]
    fn matrix_round_trip(rows in (2usize..7).prop_flat_map(|n| proptest::collection::vec(
        proptest::collection::vec(proptest::num::f64::POSITIVE | proptest::num::f64::NORMAL, n), n))) {
        let n = rows.len();
        let m = CostMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { rows[i][j].abs() }).unwrap();
        prop_assert_eq!(bits(&parse_matrix_json(&matrix_to_json(&m), Path::new("m.json")).unwrap()), bits(&m));
        prop_assert_eq!(bits(&parse_matrix_csv(&matrix_to_csv(&m), Path::new("m.csv")).unwrap()), bits(&m));
    }

    #[test]
    fn constraint_round_trip(seed in any::<u64>(), n in 2usize..7, kind in 0usize..4, w in proptest::option::of(0.0f64..1e6)) {
        let mut c = gen_constraints(ConstraintKind::ALL[kind], n, &mut rng_from_seed(seed)).unwrap();
        c.weights.k = w;
        c.weights.r = w.map(|x| x / 3.0);
        prop_assert_eq!(parse_constraints(&constraints_to_json(&c, n), n, Path::new("c.json")).unwrap(), c);
    }

    #[test]
    fn graph_round_trip(seed in any::<u64>(), nodes in 2usize..10, chords in 0usize..20) {
        let g = random_graph(nodes, chords, seed);
        prop_assert_eq!(WeightedDigraph::parse_csv(&g.to_csv(), Path::new("g.csv")).unwrap(), g);
    }
}
