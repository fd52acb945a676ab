use apsp::core::verify::{VerifyOptions, F32_REL_TOL};
use apsp::core::verify_solution;
use apsp::core::{
    dijkstra_apsp, fw_blocked_serial, fw_naive, generate, reconstruct_path, DistanceMatrix, GraphGenSpec, Isa,
    PredecessorMatrix, Weight,
};
use apsp::{fw_blocked, fw_naive_parallel, SolveOptions};
use proptest::prelude::*;

fn path_cost<T: Weight>(input: &DistanceMatrix<T>, preds: &PredecessorMatrix, i: usize, j: usize) -> Option<f64> {
    reconstruct_path(preds, input, i, j)
        .unwrap()
        .map(|p| p.total_cost.to_f64())
}

fn check_against_naive<T: Weight>(input: &DistanceMatrix<T>, tb: usize, threads: usize) {
    let (d, p) = fw_naive(input).unwrap();
    let r = fw_blocked(input, tb, threads).unwrap();
    assert!(r.distances.bit_eq(&d), "n={} tb={tb} threads={threads}", input.n());
    if r.predecessors != p {
        // different tie-breaking is allowed; the paths must still cost the same
        for i in 0..input.n() {
            for j in 0..input.n() {
                assert_eq!(
                    path_cost(input, &r.predecessors, i, j),
                    path_cost(input, &p, i, j),
                    "({i}, {j})"
                );
            }
        }
    }
}

#[test]
fn small_grid_matches_naive_and_dijkstra() {
    for density in [0.1, 0.5, 1.0] {
        for seed in 0..2 {
            let spec = GraphGenSpec::new(64, seed).with_density(density);
            let a = generate::<f32>(&spec).unwrap();
            let b = generate::<f64>(&spec).unwrap();
            let da = dijkstra_apsp(&a).unwrap();
            let db = dijkstra_apsp(&b).unwrap();
            for tb in [8, 16, 32] {
                for threads in [1, 2, 4] {
                    check_against_naive(&a, tb, threads);
                    check_against_naive(&b, tb, threads);
                    assert!(fw_blocked(&a, tb, threads).unwrap().distances.bit_eq(&da));
                    assert!(fw_blocked(&b, tb, threads).unwrap().distances.bit_eq(&db));
                }
            }
        }
    }
}

#[test]
fn serial_and_parallel_blocked_agree() {
    let input = generate::<f64>(&GraphGenSpec::new(96, 11).with_density(0.2)).unwrap();
    let (d, p) = fw_blocked_serial(&input, 16, Isa::baseline()).unwrap();
    for threads in [1, 3] {
        let r = fw_blocked(&input, 16, threads).unwrap();
        assert!(r.distances.bit_eq(&d));
        assert_eq!(r.predecessors, p);
    }
}

#[test]
fn baseline_and_detected_isa_agree() {
    let input = generate::<f32>(&GraphGenSpec::new(64, 5).with_density(0.3)).unwrap();
    let reference = fw_blocked_serial(&input, 16, Isa::baseline()).unwrap();
    for isa in [Isa::baseline(), apsp::detect_isa()] {
        let opts = SolveOptions { isa, trace: false };
        let r = apsp::fw_blocked_with(&input, 16, 2, &opts).unwrap();
        assert!(r.distances.bit_eq(&reference.0), "{isa:?}");
        assert_eq!(r.predecessors, reference.1, "{isa:?}");
    }
}

/// Blocked and naive Floyd-Warshall may record different but equally short
/// paths. Vertices 0, 1, 2 sit in the first tile and 4 in the second; the
/// naive order reaches 0 -> 4 through k = 2 (0 -> 2 -> [1 -> 4]) while the
/// blocked order closes 0 -> 1 inside the pivot tile first and records
/// k = 1 (0 -> [2] -> 1 -> 4). Both expand to 0, 2, 1, 4 with cost 3.
#[test]
fn predecessors_may_differ_with_equal_paths() {
    let mut input = DistanceMatrix::<f64>::unconnected(8).unwrap();
    input.set(0, 2, 1.0);
    input.set(2, 1, 1.0);
    input.set(1, 4, 1.0);
    let (d, p) = fw_naive(&input).unwrap();
    let r = fw_blocked(&input, 4, 1).unwrap();
    assert!(r.distances.bit_eq(&d));
    assert_eq!(p.get(0, 4), Some(2));
    assert_eq!(r.predecessors.get(0, 4), Some(1));
    let naive_path = reconstruct_path(&p, &input, 0, 4).unwrap().unwrap();
    let blocked_path = reconstruct_path(&r.predecessors, &input, 0, 4).unwrap().unwrap();
    assert_eq!(naive_path.vertices, [0, 2, 1, 4]);
    assert_eq!(blocked_path, naive_path);
    assert_eq!(blocked_path.total_cost, 3.0);
}

#[test]
fn negative_edges_without_cycles() {
    // a DAG ordered by vertex index, so no cycle can form
    let n = 48;
    let base = generate::<f64>(&GraphGenSpec::new(n, 9).with_density(0.3)).unwrap();
    let mut input = DistanceMatrix::<f64>::unconnected(n).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            let w = base.get(i, j);
            if w.is_finite() {
                input.set(i, j, w - 50.0);
            }
        }
    }
    for threads in [1, 2] {
        check_against_naive(&input, 16, threads);
    }
}

#[test]
fn nonintegral_weights_agree_within_tolerance() {
    // float addition is not associative, so blocked and naive may round
    // differently along different but equally short paths
    let n = 64;
    let mut input = generate::<f32>(&GraphGenSpec::new(n, 2).with_density(0.4)).unwrap();
    for v in input.as_mut_slice() {
        if v.is_finite() && *v > 0.0 {
            *v = *v / 7.0 + 0.1;
        }
    }
    let (d, _) = fw_naive(&input).unwrap();
    let r = fw_blocked(&input, 16, 2).unwrap();
    for (a, b) in r.distances.as_slice().iter().zip(d.as_slice()) {
        assert!(
            a == b || ((a - b).abs() as f64) <= F32_REL_TOL * (b.abs() as f64),
            "{a} vs {b}"
        );
    }
    let report = verify_solution(&input, &r.distances, &r.predecessors, &VerifyOptions::default());
    assert!(report.passed(), "{}", report.to_text());
    assert!(!report.exact);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocked_matches_naive(
        blocks in 1usize..6,
        tb in prop::sample::select(vec![1usize, 2, 4, 8, 12, 16]),
        threads in 1usize..4,
        density in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let n = blocks * tb;
        let input = generate::<f32>(&GraphGenSpec::new(n, seed).with_density(density)).unwrap();
        check_against_naive(&input, tb, threads);
    }

    #[test]
    fn naive_parallel_is_exact(n in 1usize..40, threads in 1usize..5, seed in any::<u64>()) {
        let input = generate::<f64>(&GraphGenSpec::new(n, seed).with_density(0.3)).unwrap();
        let (d, p) = fw_naive(&input).unwrap();
        let r = fw_naive_parallel(&input, threads, &SolveOptions::default()).unwrap();
        prop_assert!(r.distances.bit_eq(&d));
        prop_assert_eq!(r.predecessors, p);
    }

    #[test]
    fn triangle_inequality_holds(n_blocks in 1usize..5, seed in any::<u64>()) {
        let n = n_blocks * 8;
        let input = generate::<f64>(&GraphGenSpec::new(n, seed).with_density(0.25)).unwrap();
        let d = fw_blocked(&input, 8, 2).unwrap().distances;
        for i in 0..n {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..n {
                prop_assert!(d.get(i, j) <= input.get(i, j));
                for k in 0..n {
                    prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j));
                }
            }
        }
    }
}
