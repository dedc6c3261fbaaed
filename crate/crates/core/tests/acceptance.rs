//! Acceptance run: one line per criterion, library results against the
//! reference implementations in `common`. Exits nonzero on any failure.

mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use spacetime_perc::connectivity::{build_clusters, directed_reach, estimate_theta_curve, fit_theta_curve, EnvironmentModel, LatticeBox};
use spacetime_perc::experiment::block_entropies;
use spacetime_perc::meanfield::{
    cut_count_normaliser, cut_count_pmf, f, fq, lambda_c, sample_weighted_interval, simulate_complete_graph, survival_probability,
    ChainBudget, OffspringRate,
};
use spacetime_perc::quantum::{
    build_hamiltonian, gibbs_operator, ground_state_density, norm_difference, rc_reduced_matrix, reduced_density, McBudget, NormMode,
    QuantumParams,
};
use spacetime_perc::rc::{RcChain, RcParams};
use spacetime_perc::rng::{stream, Role};
use spacetime_perc::spacetime::{sample_configuration, sample_directed_configuration, Bridge};
use spacetime_perc::{Boundary, Configuration, Graph, IntensityEnvironment, Point, SpaceTimeBox};

const BASE_SEED: u64 = 20261016;

type Verdict = Result<(bool, String), String>;

/// Matrices produced by the library during this run, checked in criterion 9.
#[derive(Default)]
struct Produced(Vec<DMatrix<f64>>);

fn seed(id: u64) -> u64 {
    BASE_SEED + id
}

fn graphs_up_to_three() -> Vec<(&'static str, Graph)> {
    vec![
        ("K1", Graph::single_vertex()),
        ("K2", Graph::path(2).unwrap()),
        ("P3", Graph::path(3).unwrap()),
        ("K3", Graph::cycle(3).unwrap()),
    ]
}

const TRIPLES: [(f64, f64, f64); 3] = [(1.0, 1.0, 1.0), (2.0, 1.0, 0.5), (0.5, 2.0, 2.0)];

fn z(estimate: f64, exact: f64, stderr: f64) -> f64 {
    let diff = estimate - exact;
    if diff.abs() < 1e-12 {
        0.0
    } else {
        diff / stderr
    }
}

fn z_summary(zs: &[f64]) -> (bool, String) {
    let n = zs.len();
    let w3 = zs.iter().filter(|z| z.abs() <= 3.0).count();
    let w2 = zs.iter().filter(|z| z.abs() <= 2.0).count();
    let max = zs.iter().map(|z| z.abs()).fold(0.0, f64::max);
    (w3 == n && w2 as f64 >= 0.95 * n as f64, format!("{n} elements, {w3} with |z|<=3, {w2} ({:.1}%) with |z|<=2, max |z| {max:.2}", 100.0 * w2 as f64 / n as f64))
}

/// Scores of the random-cluster estimate of the state reduced to `w` against
/// the series-exponential oracle.
fn element_scores(g: &Graph, triple: (f64, f64, f64), w: &[usize], replica: u64, id: u64, produced: &mut Produced) -> Result<Vec<f64>, String> {
    let (lambda, delta, beta) = triple;
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let exact = partial_trace(&gibbs(&pauli_hamiltonian(n, &edges, lambda, delta), beta), n, w);
    let p = QuantumParams::new(g.clone(), lambda, delta, beta).map_err(|e| e.to_string())?;
    let rho = gibbs_operator(&build_hamiltonian(&p).map_err(|e| e.to_string())?, beta).map_err(|e| e.to_string())?;
    produced.0.push(rho.matrix().clone());
    produced.0.push(reduced_density(&rho, w).map_err(|e| e.to_string())?.matrix().clone());
    let mut budget = McBudget::new(1_000, 100_000, seed(id));
    budget.replica = replica;
    let est = rc_reduced_matrix(&p, w, &budget).map_err(|e| e.to_string())?;
    let mut zs = Vec::new();
    for a in 0..est.dimension {
        for b in 0..est.dimension {
            zs.push(z(est.value(a, b), exact[(a, b)], est.error(a, b)));
        }
    }
    Ok(zs)
}

fn criterion_1(produced: &mut Produced) -> Verdict {
    let mut zs = Vec::new();
    let mut replica = 0;
    for (_, g) in graphs_up_to_three() {
        for t in TRIPLES {
            let w: Vec<usize> = (0..g.vertex_count()).collect();
            zs.extend(element_scores(&g, t, &w, replica, 1, produced)?);
            replica += 1;
        }
    }
    Ok(z_summary(&zs))
}

fn criterion_2(produced: &mut Produced) -> Verdict {
    let mut zs = Vec::new();
    let mut replica = 0;
    for n in [2usize, 3] {
        let g = Graph::path(n).unwrap();
        for mask in 1..(1u32 << n) - 1 {
            let w: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            for t in TRIPLES {
                zs.extend(element_scores(&g, t, &w, replica, 2, produced)?);
                replica += 1;
            }
        }
    }
    Ok(z_summary(&zs))
}

/// Percolation sample drawn directly from Poisson counts and uniform times.
fn fresh_percolation(bx: &SpaceTimeBox, lambda: f64, delta: f64, rng: &mut ChaCha8Rng) -> Configuration {
    let t = bx.time_length();
    let count = |rate: f64, rng: &mut ChaCha8Rng| if rate > 0.0 { Poisson::new(rate * t).unwrap().sample(rng) as usize } else { 0 };
    let cuts: Vec<Vec<f64>> = (0..bx.vertex_count()).map(|_| (0..count(delta, rng)).map(|_| rng.random::<f64>() * t).collect()).collect();
    let mut bridges = Vec::new();
    for (a, b) in bx.graph().edges() {
        for _ in 0..count(lambda, rng) {
            bridges.push(Bridge { from: a, to: b, time: rng.random::<f64>() * t });
        }
    }
    Configuration::new(bx, cuts, bridges, false).unwrap()
}

fn histogram(v: &[usize]) -> Vec<usize> {
    let mut h = vec![0; v.iter().max().map_or(1, |m| m + 1)];
    v.iter().for_each(|&x| h[x] += 1);
    h
}

fn criterion_3() -> Verdict {
    let (lambda, delta, t, sweeps) = (1.0, 1.0, 2.0, 10_000);
    let bx = SpaceTimeBox::new(Graph::path(3).unwrap(), t, Boundary::Free).unwrap();
    let mut chain = RcChain::new(bx.clone(), RcParams::new(lambda, delta, 1).with_budget(0, sweeps), stream(seed(3), 0, Role::Chain))
        .map_err(|e| e.to_string())?;
    let edges: Vec<(usize, usize)> = bx.graph().edges().collect();
    let mut cuts = vec![0.0; 3];
    let mut bridges = vec![0.0; edges.len()];
    let mut chain_k = Vec::new();
    for _ in 0..sweeps {
        chain.sweep().map_err(|e| e.to_string())?;
        let c = &chain.state().config;
        for (x, total) in cuts.iter_mut().enumerate() {
            *total += c.line_cuts(x).len() as f64;
        }
        for (e, &(a, b)) in edges.iter().enumerate() {
            bridges[e] += c.bridges_between(a, b).count() as f64;
        }
        chain_k.push(chain.labeling().cluster_count());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed(3));
    let fresh_k: Vec<usize> = (0..sweeps).map(|_| ClusterOracle::new(&fresh_percolation(&bx, lambda, delta, &mut rng), &bx).count).collect();
    let n = sweeps as f64;
    let score = |total: f64, rate: f64| (total / n - rate * t) / (rate * t / n).sqrt();
    let max_z = cuts.iter().map(|&c| score(c, delta)).chain(bridges.iter().map(|&b| score(b, lambda))).map(f64::abs).fold(0.0, f64::max);
    let p = chi_square_p(&histogram(&chain_k), &histogram(&fresh_k));
    Ok((max_z <= 3.0 && p > 1e-3, format!("{sweeps} sweeps: max |z| of per-line/per-edge means {max_z:.2}; cluster-count chi-square p {p:.3}")))
}

fn criterion_4() -> Verdict {
    let (beta, n, replicas) = (1.0, 2_000, 50u64);
    let lc = lambda_c_bisection(beta);
    let lib_lc = lambda_c(beta, 1.0).map_err(|e| e.to_string())?.value;
    let target = beta * survival_oracle(beta, 2.0);
    let lib_pi = survival_probability(beta, 2.0, 1.0, OffspringRate::Upper).map_err(|e| e.to_string())?;
    let fractions = |lambda: f64, group: u64| -> Result<Vec<f64>, String> {
        (0..replicas)
            .map(|r| {
                simulate_complete_graph(n, beta, lambda, 1, ChainBudget::default(), stream(seed(4), group << 24 | r, Role::Chain))
                    .map(|s| s.giant_fraction())
                    .map_err(|e| e.to_string())
            })
            .collect()
    };
    let sup = fractions(2.0, 0)?;
    let sub = fractions(0.5, 1)?;
    let mean = sup.iter().sum::<f64>() / sup.len() as f64;
    let small = sub.iter().filter(|&&m| m <= 0.05).count();
    let ok = (lc - 1.1156).abs() < 5e-5
        && (lib_lc - lc).abs() < 1e-9
        && (lib_pi * beta - target).abs() < 1e-8
        && (mean - target).abs() <= 0.03
        && small as f64 >= 0.95 * sub.len() as f64;
    Ok((
        ok,
        format!(
            "λ_c(1) = {lc:.6} (library {lib_lc:.6}); λ=2: mean M/n {mean:.4} vs βπ {target:.4}; λ=0.5: {small}/{} replicas with M/n <= 0.05",
            sub.len()
        ),
    ))
}

fn criterion_5() -> Verdict {
    let trees = 1_000_000;
    let grid = [(1.0, 2.0), (1.0, 3.0), (0.5, 4.0), (2.0, 1.5), (2.0, 2.5), (4.0, 1.5)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (beta, lambda)) in grid.into_iter().enumerate() {
        let pi = survival_probability(beta, lambda, 1.0, OffspringRate::Upper).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed(5) * 16 + i as u64);
        let hits = branching_oracle(beta, lambda, trees, 200, &mut rng);
        let est = hits as f64 / trees as f64;
        let score = (est - pi) / (pi * (1.0 - pi) / trees as f64).sqrt();
        ok &= score.abs() <= 3.0;
        parts.push(format!("(β={beta},λ={lambda}) π {pi:.4} sim {est:.4} z {score:.2}"));
    }
    Ok((ok, format!("{trees} trees each: {}", parts.join("; "))))
}

fn criterion_6() -> Verdict {
    let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
    let mut f1: f64 = 0.0;
    for &b in &grid {
        for &l in &grid {
            let fv = f(b, l).map_err(|e| e.to_string())?;
            f1 = f1.max((fq(b, l, 1.0).map_err(|e| e.to_string())? - fv).abs() / fv.abs().max(1.0));
        }
    }
    let mut lc: f64 = 0.0;
    for &b in &grid {
        lc = lc.max((lambda_c(b, 2.0).map_err(|e| e.to_string())?.value - 2.0 / b.tanh()).abs());
    }
    let mut pmf: f64 = 0.0;
    for b in [0.5, 1.0, 2.0, 4.0] {
        for q in [1.0, 1.5, 2.0, 3.0] {
            let total: f64 = (0..400).map(|k| cut_count_pmf(k, b, q).unwrap()).sum();
            let z_lib = cut_count_normaliser(b, q).map_err(|e| e.to_string())?;
            pmf = pmf.max((total - 1.0).abs()).max((z_lib / printed_z(b, q) - 1.0).abs());
        }
    }
    let beta = 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed(6));
    let lib: Vec<f64> = (0..100_000).map(|_| sample_weighted_interval(beta, 1.0, &mut rng).unwrap()).collect();
    let oracle: Vec<f64> = (0..100_000).map(|_| min_u_plus_v(beta, &mut rng)).collect();
    let (d, p) = ks_p(&lib, &oracle);
    Ok((
        f1 <= 1e-14 && lc <= 1e-12 && pmf <= 1e-12 && p > 1e-3,
        format!("F_1 vs F {f1:.1e}; λ_c(q=2) vs 2/tanh β {lc:.1e}; pmf sum and Z {pmf:.1e}; KS vs min(U+V,β) D {d:.4} p {p:.3}"),
    ))
}

fn criterion_7() -> Verdict {
    let lattice = LatticeBox::new(1, 8, 8.0);
    let radii: Vec<f64> = (1..=8).map(f64::from).collect();
    let trials = 10_000;
    let curve = |lambda: f64, offset: u64| {
        estimate_theta_curve(&lattice, &EnvironmentModel::homogeneous(lambda, 1.0), false, &radii, trials, seed(7) + offset).map_err(|e| e.to_string())
    };
    let (sub, sup) = (curve(0.8, 0)?, curve(1.2, 1)?);
    let at = [3usize, 5, 7];
    let above = at.iter().all(|&i| sup[i].estimate > sub[i].estimate);
    let ratio: Vec<f64> = at.iter().map(|&i| sup[i].estimate / sub[i].estimate).collect();
    let widening = ratio.windows(2).all(|w| w[1] > w[0]);
    let zq = 1.959_963_984_540_054;
    let apart = sup[7].estimate - zq * sup[7].stderr > sub[7].estimate + zq * sub[7].stderr;
    let fit = fit_theta_curve(&sub).map_err(|e| e.to_string())?;
    let (slope, ci) = (-fit.rate, (-fit.ci95.1, -fit.ci95.0));
    Ok((
        above && widening && apart && slope < 0.0 && ci.1 < 0.0,
        format!(
            "θ(1.2)/θ(0.8) at R=4,6,8: {:.3}, {:.3}, {:.3}; R=8: [{:.4}, {:.4}] vs [{:.4}, {:.4}]; λ=0.8 log-slope {slope:.4} CI ({:.4}, {:.4})",
            ratio[0],
            ratio[1],
            ratio[2],
            sup[7].estimate - zq * sup[7].stderr,
            sup[7].estimate + zq * sup[7].stderr,
            sub[7].estimate - zq * sub[7].stderr,
            sub[7].estimate + zq * sub[7].stderr,
            ci.0,
            ci.1
        ),
    ))
}

fn criterion_8(produced: &mut Produced) -> Verdict {
    let (theta, ls, ms) = (0.2, [2usize, 3, 4, 5, 6], [0usize, 1, 2, 3]);
    let entries = block_entropies(theta, 1.0, &ls, &ms).map_err(|e| e.to_string())?;
    let s = |l: usize, m: usize| entries.iter().find(|e| e.0 == l && e.1 == m).unwrap().2;
    let mut ok = true;
    let mut oracle_gap: f64 = 0.0;
    for &l in &ls {
        for &m in &ms {
            let v = s(l, m);
            ok &= v >= 0.0 && v <= (l + 1) as f64;
            if l > 2 {
                ok &= v >= s(l - 1, m) - 1e-10;
            }
            let n = l + 2 * m + 1;
            let w: Vec<usize> = (m..=m + l).collect();
            let p = QuantumParams::new(Graph::path(n).unwrap(), theta, 1.0, 1.0).unwrap();
            produced.0.push(ground_state_density(&p, &w).map_err(|e| e.to_string())?.0.matrix().clone());
            if n <= 11 {
                let oracle = entropy_bits(&partial_trace(&path_ground_state(n, theta, 1.0), n, &w));
                oracle_gap = oracle_gap.max((oracle - v).abs());
            }
        }
    }
    ok &= oracle_gap < 1e-8;
    let ratio = |l: usize, m: usize| s(l, m) / (l as f64).log2();
    let k = ls[..3].iter().flat_map(|&l| ms.iter().map(move |&m| (l, m))).map(|(l, m)| ratio(l, m)).fold(0.0, f64::max);
    let worst = ls[3..].iter().flat_map(|&l| ms.iter().map(move |&m| (l, m))).map(|(l, m)| ratio(l, m)).fold(0.0, f64::max);
    ok &= worst <= k;
    let norms: Vec<f64> = ms.iter().map(|&m| norm_difference(2, m, 4, theta, 1.0, NormMode::Ground)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let decreasing = norms[..3].windows(2).all(|w| w[1] < w[0]) && norms[3] <= norms[2];
    ok &= decreasing;
    let shown: Vec<String> = norms.iter().map(|v| format!("{v:.2e}")).collect();
    Ok((
        ok,
        format!("0 <= S <= |W| and nondecreasing in L; max |S - dense oracle| {oracle_gap:.1e}; K {k:.4} vs max S/log2 L on L=5,6 {worst:.4}; ||ρ_m - ρ_4|| {}", shown.join(", ")),
    ))
}

fn random_box(rng: &mut ChaCha8Rng) -> SpaceTimeBox {
    let n = rng.random_range(1..=5);
    let graph = match rng.random_range(0..3) {
        0 => Graph::path(n).unwrap(),
        1 if n >= 3 => Graph::cycle(n).unwrap(),
        _ => Graph::complete(n).unwrap(),
    };
    let boundary = match rng.random_range(0..3) {
        0 => Boundary::Free,
        1 => Boundary::PeriodicAll,
        _ => Boundary::periodic_on((0..n).filter(|_| rng.random_bool(0.5)).collect::<Vec<_>>()),
    };
    SpaceTimeBox::new(graph, rng.random_range(0.5..3.0), boundary).unwrap()
}

fn density_ok(m: &DMatrix<f64>) -> bool {
    let sym = (m - m.transpose()).amax() <= 1e-12;
    let trace = (m.trace() - 1.0).abs() <= 1e-10;
    let psd = m.clone().symmetric_eigenvalues().iter().all(|&e| e >= -1e-10);
    sym && trace && psd
}

fn run_binary_twice() -> Result<bool, String> {
    let dir = std::env::temp_dir().join(format!("stperc-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("c.toml");
    fs::write(
        &cfg,
        "kind = \"quantum-validate\"\nseed = 11\n[params]\ngraph = \"path:3\"\nlambda = 1.0\ndelta = 1.0\nbeta = 1.0\nkept = [0, 2]\nsweeps = 4000\nburn_in = 100\n",
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "2")] {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_stperc"))
            .args(["run", "--config", cfg.to_str().unwrap(), "--workers", workers, "--out", out.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() && status.status.code() != Some(2) {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        let files: Vec<Vec<u8>> = ["validation.json", "exact.csv", "estimate.csv", "stderr.csv"]
            .iter()
            .map(|f| fs::read(out.join(f)).unwrap_or_default())
            .collect();
        outputs.push(files);
    }
    let _ = fs::remove_dir_all(&dir);
    Ok(outputs[0] == outputs[1] && outputs[0].iter().all(|f| !f.is_empty()))
}

fn criterion_9(produced: &Produced) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed(9));
    let (mut mismatches, mut escapes, mut directed_mismatch) = (0, 0, 0);
    let configs = 10_000;
    for _ in 0..configs {
        let bx = random_box(&mut rng);
        let env = IntensityEnvironment::homogeneous(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let config = sample_configuration(&bx, &env, &mut rng).unwrap();
        let labeling = build_clusters(&config, &bx).unwrap();
        let oracle = ClusterOracle::new(&config, &bx);
        let mut same = labeling.cluster_count() == oracle.count;
        for _ in 0..10 {
            let a = Point::new(rng.random_range(0..bx.vertex_count()), rng.random::<f64>() * bx.time_length());
            let b = Point::new(rng.random_range(0..bx.vertex_count()), rng.random::<f64>() * bx.time_length());
            same &= labeling.connected(a, b) == oracle.connected(a, b);
        }
        mismatches += usize::from(!same);

        let directed = sample_directed_configuration(&bx, &env, &mut rng).unwrap();
        let undirected = ClusterOracle::new(&directed.undirected(), &bx);
        let origin = Point::new(rng.random_range(0..bx.vertex_count()), rng.random::<f64>() * bx.time_length());
        let reach = directed_reach(&directed, &bx, origin).unwrap();
        let t = bx.time_length();
        if !reach.pieces.iter().all(|p| undirected.connected(origin, Point::new(p.vertex, (0.5 * (p.start + p.end)) % t))) {
            escapes += 1;
        }
        if bx.boundary() == &Boundary::Free {
            let sweep = directed_oracle(&directed, &bx, origin);
            for _ in 0..10 {
                let p = Point::new(rng.random_range(0..bx.vertex_count()), rng.random::<f64>() * t);
                directed_mismatch += usize::from(reach.contains(p, t) != reached(&sweep, p));
            }
        }
    }
    let bad = produced.0.iter().filter(|m| !density_ok(m)).count();
    let deterministic = run_binary_twice()?;
    Ok((
        mismatches == 0 && escapes == 0 && directed_mismatch == 0 && bad == 0 && deterministic,
        format!(
            "{configs} configs: {mismatches} union-find/BFS mismatches, {escapes} directed escapes, {directed_mismatch} directed/sweep mismatches; \
             {bad}/{} library density matrices violate invariants; byte-identical reruns: {deterministic}",
            produced.0.len()
        ),
    ))
}

fn main() -> ExitCode {
    let mut produced = Produced::default();
    let mut all = true;
    for id in 1..=9u8 {
        let start = Instant::now();
        let verdict = match id {
            1 => criterion_1(&mut produced),
            2 => criterion_2(&mut produced),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(),
            8 => criterion_8(&mut produced),
            _ => criterion_9(&produced),
        };
        let (ok, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= ok;
        println!("criterion {id}: {} ({:.1} s) {detail}", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
