mod common;

use approx::assert_abs_diff_eq;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacetime_perc::connectivity::{build_clusters, directed_reach};
use spacetime_perc::meanfield::{
    cut_count_pmf, f, lambda_c, sample_weighted_interval, simulate_branching, survival_probability, OffspringRate,
};
use spacetime_perc::quantum::{
    build_hamiltonian, entanglement_entropy, gibbs_operator, ground_state_density, reduced_density, QuantumParams,
};
use spacetime_perc::spacetime::{sample_configuration, sample_directed_configuration};
use spacetime_perc::{Boundary, Graph, IntensityEnvironment, Point, SpaceTimeBox};

fn graphs() -> Vec<Graph> {
    vec![
        Graph::single_vertex(),
        Graph::path(2).unwrap(),
        Graph::path(4).unwrap(),
        Graph::cycle(3).unwrap(),
        Graph::cycle(5).unwrap(),
        Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap(),
    ]
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    for g in graphs() {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        for (lambda, delta) in [(1.0, 1.0), (2.0, 0.3), (0.0, 1.5)] {
            let n = g.vertex_count();
            let h = build_hamiltonian(&QuantumParams::new(g.clone(), lambda, delta, 1.0).unwrap()).unwrap();
            let oracle = pauli_hamiltonian(n, &edges, lambda, delta);
            assert!((h - oracle).amax() < 1e-12);
        }
    }
}

#[test]
fn gibbs_and_partial_traces_match_series_exponential() {
    for g in graphs() {
        let n = g.vertex_count();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        for (lambda, delta, beta) in [(1.0, 1.0, 1.0), (2.0, 1.0, 0.5), (0.5, 2.0, 2.0)] {
            let p = QuantumParams::new(g.clone(), lambda, delta, beta).unwrap();
            let rho = gibbs_operator(&build_hamiltonian(&p).unwrap(), beta).unwrap();
            let oracle = gibbs(&pauli_hamiltonian(n, &edges, lambda, delta), beta);
            assert!((rho.matrix() - &oracle).amax() < 1e-10);
            for mask in 1..(1u32 << n) {
                let w: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let r = reduced_density(&rho, &w).unwrap();
                assert!((r.matrix() - partial_trace(&oracle, n, &w)).amax() < 1e-10);
            }
        }
    }
}

#[test]
fn single_spin_off_diagonal_is_half_tanh() {
    let p = QuantumParams::new(Graph::single_vertex(), 1.0, 1.0, 1.0).unwrap();
    let rho = gibbs_operator(&build_hamiltonian(&p).unwrap(), 1.0).unwrap();
    assert_abs_diff_eq!(rho.get(1, 1), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(rho.get(1, 0), 0.380_797_078_0, epsilon = 1e-10);
}

#[test]
fn ground_state_entropies_match_dense_oracle() {
    // 11 sites exercises the Lanczos path
    for (l, m) in [(1, 0), (2, 1), (3, 1), (2, 2), (4, 3)] {
        let n = l + 2 * m + 1;
        let w: Vec<usize> = (m..=m + l).collect();
        let p = QuantumParams::new(Graph::path(n).unwrap(), 0.2, 1.0, 1.0).unwrap();
        let (rho, degenerate) = ground_state_density(&p, &w).unwrap();
        assert!(!degenerate);
        let oracle = partial_trace(&path_ground_state(n, 0.2, 1.0), n, &w);
        assert!((rho.matrix() - &oracle).amax() < 1e-8, "L={l} m={m}");
        assert_abs_diff_eq!(entanglement_entropy(&rho).unwrap(), entropy_bits(&oracle), epsilon = 1e-8);
    }
}

fn random_box(rng: &mut ChaCha8Rng, free_only: bool) -> SpaceTimeBox {
    let n = rng.random_range(1..=5);
    let graph = match rng.random_range(0..3) {
        0 => Graph::path(n).unwrap(),
        1 if n >= 3 => Graph::cycle(n).unwrap(),
        _ => Graph::complete(n).unwrap(),
    };
    let boundary = if free_only {
        Boundary::Free
    } else {
        match rng.random_range(0..3) {
            0 => Boundary::Free,
            1 => Boundary::PeriodicAll,
            _ => Boundary::periodic_on((0..n).filter(|_| rng.random_bool(0.5)).collect::<Vec<_>>()),
        }
    };
    SpaceTimeBox::new(graph, rng.random_range(0.5..3.0), boundary).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, bx: &SpaceTimeBox) -> Point {
    Point::new(rng.random_range(0..bx.vertex_count()), rng.random::<f64>() * bx.time_length())
}

#[test]
fn union_find_clusters_match_breadth_first_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..2_000 {
        let bx = random_box(&mut rng, false);
        let env = IntensityEnvironment::homogeneous(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let config = sample_configuration(&bx, &env, &mut rng).unwrap();
        let labeling = build_clusters(&config, &bx).unwrap();
        let oracle = ClusterOracle::new(&config, &bx);
        assert_eq!(labeling.cluster_count(), oracle.count);
        for _ in 0..20 {
            let (a, b) = (random_point(&mut rng, &bx), random_point(&mut rng, &bx));
            assert_eq!(labeling.connected(a, b), oracle.connected(a, b));
        }
    }
}

#[test]
fn directed_reach_matches_time_ordered_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..2_000 {
        let bx = random_box(&mut rng, true);
        let env = IntensityEnvironment::homogeneous(rng.random_range(0.0..3.0), rng.random_range(0.0..2.0));
        let config = if rng.random_bool(0.5) {
            sample_directed_configuration(&bx, &env, &mut rng).unwrap()
        } else {
            sample_configuration(&bx, &env, &mut rng).unwrap()
        };
        let origin = random_point(&mut rng, &bx);
        let cluster = directed_reach(&config, &bx, origin).unwrap();
        let oracle = directed_oracle(&config, &bx, origin);
        let undirected = ClusterOracle::new(&config.undirected(), &bx);
        for _ in 0..30 {
            let p = random_point(&mut rng, &bx);
            let hit = cluster.contains(p, bx.time_length());
            assert_eq!(hit, reached(&oracle, p));
            if hit {
                assert!(undirected.connected(origin, p));
            }
        }
    }
}

#[test]
fn mean_field_formulas_match_oracles() {
    for beta in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        for lambda in [0.5, 1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(f(beta, lambda).unwrap(), f_oracle(beta, lambda), epsilon = 1e-13);
            let pi = survival_probability(beta, lambda, 1.0, OffspringRate::Upper).unwrap();
            assert_abs_diff_eq!(pi, survival_oracle(beta, lambda), epsilon = 1e-8);
        }
        assert_abs_diff_eq!(lambda_c(beta, 1.0).unwrap().value, lambda_c_bisection(beta), epsilon = 1e-10);
        for q in [1.0, 2.0, 3.5] {
            let z = printed_z(beta, q);
            let mut term = (-beta).exp();
            for k in 0..60usize {
                if k > 0 {
                    term *= beta / k as f64;
                }
                let expect = term * q.powi(k.max(1) as i32) / z;
                assert_abs_diff_eq!(cut_count_pmf(k, beta, q).unwrap(), expect, epsilon = 1e-12 * expect);
            }
        }
    }
    assert_abs_diff_eq!(lambda_c_bisection(1.0), 1.1156, epsilon = 1e-4);
}

#[test]
fn unweighted_interval_is_min_of_two_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for beta in [0.5, 1.5, 4.0] {
        let a: Vec<f64> = (0..20_000).map(|_| sample_weighted_interval(beta, 1.0, &mut rng).unwrap()).collect();
        let b: Vec<f64> = (0..20_000).map(|_| min_u_plus_v(beta, &mut rng)).collect();
        let (d, p) = ks_p(&a, &b);
        assert!(p > 1e-3, "β={beta}: D={d} p={p}");
    }
}

#[test]
fn simulated_branching_matches_closed_form_survival() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let trees = 20_000;
    for (beta, lambda) in [(1.0, 2.0), (2.0, 1.5)] {
        let pi = survival_oracle(beta, lambda);
        let hits = simulate_branching(beta, lambda, 1.0, OffspringRate::Upper, trees, &mut rng).unwrap();
        let se = (pi * (1.0 - pi) / trees as f64).sqrt();
        assert!((hits as f64 / trees as f64 - pi).abs() < 4.0 * se);
        let oracle_hits = branching_oracle(beta, lambda, trees, 200, &mut rng);
        assert!((oracle_hits as f64 / trees as f64 - pi).abs() < 4.0 * se);
    }
}
