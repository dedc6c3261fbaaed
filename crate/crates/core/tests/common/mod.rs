//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the library's algorithms;
//! only plain data (cut lists, bridge lists, parameters) crosses over.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use spacetime_perc::{Configuration, Point, SpaceTimeBox};

// ---------- quantum ----------

fn pauli_z() -> DMatrix<f64> {
    // index 0 is spin -1, index 1 is spin +1
    DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])
}

fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with site 0 as the least significant factor.
fn on_site(op: &DMatrix<f64>, site: usize, n: usize) -> DMatrix<f64> {
    let mut acc = DMatrix::from_element(1, 1, 1.0);
    for k in (0..n).rev() {
        let factor = if k == site { op.clone() } else { DMatrix::identity(2, 2) };
        acc = acc.kronecker(&factor);
    }
    acc
}

/// `-(λ/2) Σ_edges Z Z - δ Σ_x X` by Kronecker products.
pub fn pauli_hamiltonian(n: usize, edges: &[(usize, usize)], lambda: f64, delta: f64) -> DMatrix<f64> {
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    let (z, x) = (pauli_z(), pauli_x());
    for &(a, b) in edges {
        h -= 0.5 * lambda * on_site(&z, a, n) * on_site(&z, b, n);
    }
    for s in 0..n {
        h -= delta * on_site(&x, s, n);
    }
    h
}

/// `exp(a)` by scaling and squaring with a 30-term Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().row_sum().max();
    let mut s = 0;
    while norm / f64::from(1u32 << s.min(30)) > 0.25 {
        s += 1;
    }
    let scaled = a / f64::from(1u32 << s);
    let dim = a.nrows();
    let mut term = DMatrix::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `e^{-βH} / tr e^{-βH}`, shifted by a Gershgorin bound first.
pub fn gibbs(h: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let shift = h.abs().row_sum().max();
    let dim = h.nrows();
    let e = expm(&(-(h - DMatrix::identity(dim, dim) * -shift) * beta));
    let t = e.trace();
    e / t
}

/// Partial trace keeping `w` (any order; the result is over sorted `w`).
pub fn partial_trace(rho: &DMatrix<f64>, n: usize, w: &[usize]) -> DMatrix<f64> {
    let mut w = w.to_vec();
    w.sort_unstable();
    let rest: Vec<usize> = (0..n).filter(|x| !w.contains(x)).collect();
    let place = |a: usize, r: usize| {
        let mut i = 0;
        for (j, &x) in w.iter().enumerate() {
            i |= (a >> j & 1) << x;
        }
        for (j, &x) in rest.iter().enumerate() {
            i |= (r >> j & 1) << x;
        }
        i
    };
    let dw = 1 << w.len();
    DMatrix::from_fn(dw, dw, |a, b| (0..1 << rest.len()).map(|r| rho[(place(a, r), place(b, r))]).sum())
}

/// Von Neumann entropy in bits of a symmetric matrix.
pub fn entropy_bits(rho: &DMatrix<f64>) -> f64 {
    rho.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&p| p > 1e-14)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Ground state of a path of `n` sites by dense diagonalisation.
pub fn path_ground_state(n: usize, lambda: f64, delta: f64) -> DMatrix<f64> {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let h = pauli_hamiltonian(n, &edges, lambda, delta);
    let eig = h.symmetric_eigen();
    let i = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(i).into_owned();
    &v * v.transpose()
}

// ---------- clusters ----------

/// A cut-free interval of one line; `wrap` marks the merged first and last
/// pieces of an identified line.
#[derive(Debug, Clone, Copy)]
struct Interval {
    line: usize,
    lo: f64,
    hi: f64,
    wrap_hi: Option<f64>,
}

impl Interval {
    fn contains(&self, t: f64) -> bool {
        (t >= self.lo && t < self.hi) || self.wrap_hi.is_some_and(|h| t < h)
    }
}

/// Clusters of a configuration found by breadth-first search over explicit
/// intervals.
pub struct ClusterOracle {
    intervals: Vec<Interval>,
    component: Vec<usize>,
    pub count: usize,
}

impl ClusterOracle {
    pub fn new(config: &Configuration, bx: &SpaceTimeBox) -> Self {
        let t = bx.time_length();
        let mut intervals = Vec::new();
        for x in 0..bx.vertex_count() {
            let cuts = config.line_cuts(x);
            let mut edges = vec![0.0];
            edges.extend_from_slice(cuts);
            edges.push(t);
            let pieces: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
            if bx.is_periodic(x) && pieces.len() > 1 {
                let last = pieces[pieces.len() - 1];
                intervals.push(Interval { line: x, lo: last.0, hi: f64::INFINITY, wrap_hi: Some(pieces[0].1) });
                for &(lo, hi) in &pieces[1..pieces.len() - 1] {
                    intervals.push(Interval { line: x, lo, hi, wrap_hi: None });
                }
            } else {
                let n = pieces.len();
                for (i, &(lo, hi)) in pieces.iter().enumerate() {
                    let hi = if i + 1 == n { f64::INFINITY } else { hi };
                    intervals.push(Interval { line: x, lo, hi, wrap_hi: None });
                }
            }
        }
        let find = |x: usize, s: f64| intervals.iter().position(|iv| iv.line == x && iv.contains(s)).expect("time inside the box");
        let mut adjacency = vec![Vec::new(); intervals.len()];
        for b in config.bridges() {
            let (i, j) = (find(b.from, b.time), find(b.to, b.time));
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let mut component = vec![usize::MAX; intervals.len()];
        let mut count = 0;
        for s in 0..intervals.len() {
            if component[s] != usize::MAX {
                continue;
            }
            component[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adjacency[u] {
                    if component[v] == usize::MAX {
                        component[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        ClusterOracle { intervals, component, count }
    }

    pub fn component_of(&self, p: Point) -> usize {
        let i = self.intervals.iter().position(|iv| iv.line == p.vertex && iv.contains(p.time)).expect("point inside the box");
        self.component[i]
    }

    pub fn connected(&self, a: Point, b: Point) -> bool {
        self.component_of(a) == self.component_of(b)
    }
}

/// Directed reach on a free box by one sweep through the bridge times.
/// Returns, per line, the reached intervals `[lo, hi)`.
pub fn directed_oracle(config: &Configuration, bx: &SpaceTimeBox, origin: Point) -> Vec<Vec<(f64, f64)>> {
    let t_max = bx.time_length();
    let next_cut = |x: usize, s: f64| config.line_cuts(x).iter().copied().find(|&c| c > s).unwrap_or(t_max);
    let mut bridges: Vec<(f64, usize, usize)> = config
        .bridges()
        .iter()
        .flat_map(|b| {
            let mut v = vec![(b.time, b.from, b.to)];
            if !config.is_directed() {
                v.push((b.time, b.to, b.from));
            }
            v
        })
        .filter(|&(t, _, _)| t >= origin.time)
        .collect();
    bridges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reached: Vec<Vec<(f64, f64)>> = vec![Vec::new(); bx.vertex_count()];
    let mut active: Vec<Option<(f64, f64)>> = vec![None; bx.vertex_count()];
    let start = (origin.time, next_cut(origin.vertex, origin.time));
    active[origin.vertex] = Some(start);
    reached[origin.vertex].push(start);
    for (t, a, b) in bridges {
        let live = active[a].is_some_and(|(lo, hi)| t >= lo && t < hi);
        let covered = active[b].is_some_and(|(lo, hi)| t >= lo && t < hi);
        if live && !covered {
            let iv = (t, next_cut(b, t));
            active[b] = Some(iv);
            reached[b].push(iv);
        }
    }
    reached
}

pub fn reached(intervals: &[Vec<(f64, f64)>], p: Point) -> bool {
    intervals[p.vertex].iter().any(|&(lo, hi)| p.time >= lo && p.time < hi)
}

// ---------- mean field ----------

/// `F(β, λ) = λ [2(1 - e^{-β}) - β e^{-β}]`.
pub fn f_oracle(beta: f64, lambda: f64) -> f64 {
    lambda * (2.0 * (1.0 - (-beta).exp()) - beta * (-beta).exp())
}

/// Root of `F(β, ·) = 1` by bisection.
pub fn lambda_c_bisection(beta: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_oracle(beta, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Z = (q - 1) e^{-β} + e^{β(q - 1)}`.
pub fn printed_z(beta: f64, q: f64) -> f64 {
    (q - 1.0) * (-beta).exp() + (beta * (q - 1.0)).exp()
}

/// `min{U + V, β}` with `U, V` independent unit exponentials.
pub fn min_u_plus_v<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u: f64 = Exp1.sample(rng);
    let v: f64 = Exp1.sample(rng);
    (u + v).min(beta)
}

/// `E exp(-a min{U + V, β})` in closed form.
fn laplace_min(beta: f64, a: f64) -> f64 {
    let c = 1.0 + a;
    (1.0 - (-c * beta).exp() * (1.0 + c * beta)) / (c * c) + (1.0 + beta) * (-c * beta).exp()
}

/// Survival probability of the `q = 1` branching process with offspring
/// `Poisson(λ min{U + V, β})`, by bisection on `1 - π = E exp(-λ|I|π)`.
pub fn survival_oracle(beta: f64, lambda: f64) -> f64 {
    if f_oracle(beta, lambda) <= 1.0 {
        return 0.0;
    }
    let g = |p: f64| 1.0 - p - laplace_min(beta, lambda * p);
    let (mut lo, mut hi) = (1e-9, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // g > 0 below the root, g < 0 above it
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Trees reaching `cap` individuals in one generation.
pub fn branching_oracle<R: Rng + ?Sized>(beta: f64, lambda: f64, trees: usize, cap: usize, rng: &mut R) -> usize {
    let mut survived = 0;
    for _ in 0..trees {
        let mut alive = 1usize;
        while alive > 0 && alive < cap {
            let mut next = 0;
            for _ in 0..alive {
                let mean = lambda * min_u_plus_v(beta, rng);
                if mean > 0.0 {
                    next += Poisson::new(mean).expect("positive mean").sample(rng) as usize;
                }
            }
            alive = next;
        }
        survived += usize::from(alive >= cap);
    }
    survived
}

// ---------- statistics ----------

/// Two-sample chi-square p-value on pooled bins with expected count ≥ 5.
pub fn chi_square_p(a: &[usize], b: &[usize]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let len = a.len().max(b.len());
    let get = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let (na, nb) = (a.iter().sum::<usize>() as f64, b.iter().sum::<usize>() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for i in 0..len {
        acc = (acc.0 + get(a, i), acc.1 + get(b, i));
        let total = acc.0 + acc.1;
        if total * na.min(nb) / (na + nb) >= 5.0 {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += acc.0;
        last.1 += acc.1;
    }
    if bins.len() < 2 {
        return 1.0;
    }
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let t = x + y;
        let (ex, ey) = (t * na / (na + nb), t * nb / (na + nb));
        stat += (x - ex).powi(2) / ex + (y - ey).powi(2) / ey;
    }
    1.0 - ChiSquared::new((bins.len() - 1) as f64).unwrap().cdf(stat)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_p(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let lam = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let p: f64 = (1..=100).map(|k| 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k * k) as f64 * lam * lam).exp()).sum();
    (d, p.clamp(0.0, 1.0))
}

// ---------- discretized Potts law ----------

/// Law of `(agreement cells, jumps)` for two `q = 2` spin lines on `cells`
/// time cells with one edge, by dynamic programming over cells: weight
/// `(δh)^j (1 - δh)^{slots - j} e^{λ h a}` with a uniform initial spin pair.
pub fn discretized_two_line_law(lambda: f64, delta: f64, cells: usize, max_jumps: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / cells as f64;
    let (jump, stay) = (delta * h, 1.0 - delta * h);
    // table[pair][a][j], pair = s0 * 2 + s1
    let mut table = vec![vec![vec![0.0; max_jumps + 1]; cells + 1]; 4];
    for pair in 0..4 {
        let agree = usize::from(pair / 2 == pair % 2);
        table[pair][agree][0] = 1.0;
    }
    for _ in 1..cells {
        let mut next = vec![vec![vec![0.0; max_jumps + 1]; cells + 1]; 4];
        for from in 0..4usize {
            for to in 0..4usize {
                let flips = ((from ^ to) & 1) + ((from ^ to) >> 1);
                let w = jump.powi(flips as i32) * stay.powi(2 - flips as i32);
                let agree = usize::from(to / 2 == to % 2);
                for a in 0..cells {
                    for j in 0..=max_jumps {
                        let v = table[from][a][j];
                        if v == 0.0 || j + flips > max_jumps {
                            continue;
                        }
                        next[to][a + agree][j + flips] += v * w;
                    }
                }
            }
        }
        table = next;
    }
    let mut law = vec![vec![0.0; max_jumps + 1]; cells + 1];
    for pair in table {
        for (a, row) in pair.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                law[a][j] += v * (lambda * h * a as f64).exp();
            }
        }
    }
    let total: f64 = law.iter().flatten().sum();
    law.iter_mut().flatten().for_each(|v| *v /= total);
    law
}
