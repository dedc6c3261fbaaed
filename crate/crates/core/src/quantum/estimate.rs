use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::exact::{build_hamiltonian, gibbs_operator, ground_state_density, reduced_density, QuantumParams, DENSE_CAP};
use crate::error::{ensure, Error, Result};
use crate::graph::Graph;
use crate::rc::{RcChain, RcParams};
use crate::rng::{stream, Role};
use crate::spacetime::{Boundary, SpaceTimeBox};
use crate::stats::batch_ratio;

/// Batch count for ratio standard errors.
pub const BATCHES: usize = 32;

/// Monte Carlo budget of one random-cluster chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McBudget {
    pub burn_in: usize,
    pub sweeps: usize,
    pub seed: u64,
    /// Index of the chain's random stream.
    pub replica: u64,
}

impl McBudget {
    pub fn new(burn_in: usize, sweeps: usize, seed: u64) -> Self {
        McBudget { burn_in, sweeps, seed, replica: 0 }
    }
}

/// Matrix of ratio estimates with standard errors, row-major in the basis
/// over the kept sites.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedMatrix {
    pub dimension: usize,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl EstimatedMatrix {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dimension + col]
    }

    pub fn error(&self, row: usize, col: usize) -> f64 {
        self.stderr[row * self.dimension + col]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dimension, self.dimension, &self.values)
    }
}

/// Estimates `φ^p(σ_{W,0} = η, σ_{W,β} = η') / φ^p(σ_{W,0} = σ_{W,β})` for
/// every pair `(η, η')` from one `q = 2` chain on `V × [0, β]` whose lines
/// outside `W` are identified at `0 ≡ β`.
///
/// Each sweep contributes the exact conditional probability given the
/// configuration: `2^{-c}` when the cluster pattern of the endpoints admits
/// `(η, η')`, with `c` the number of distinct endpoint clusters.
pub fn rc_reduced_matrix(params: &QuantumParams, w: &[usize], budget: &McBudget) -> Result<EstimatedMatrix> {
    params.validate()?;
    let n = params.sites();
    ensure!(!w.is_empty(), "the kept subsystem must be nonempty");
    ensure!(w.iter().all(|&x| x < n), "kept site out of range");
    let mut w = w.to_vec();
    w.sort_unstable();
    w.dedup();
    ensure!(w.len() <= 6, "at most 6 kept sites are supported");
    ensure!(params.delta > 0.0, "the random-cluster representation needs a positive transverse field");
    ensure!(budget.sweeps >= BATCHES, "at least {BATCHES} sweeps are required");
    let outside: Vec<usize> = (0..n).filter(|x| w.binary_search(x).is_err()).collect();
    let bx = SpaceTimeBox::new(params.graph.clone(), params.beta, Boundary::periodic_on(outside))?;
    let rc = RcParams { lambda: params.lambda, delta: params.delta, q: 2, burn_in: budget.burn_in, sweeps: budget.sweeps };
    let mut chain = RcChain::new(bx, rc, stream(budget.seed, budget.replica, Role::Chain))?;
    chain.run(budget.burn_in)?;

    let k = w.len();
    let dim = 1usize << k;
    let mut num = vec![vec![0.0; dim * dim]; BATCHES];
    let mut den = vec![0.0; BATCHES];
    let per_batch = budget.sweeps / BATCHES;
    let mut endpoint_ids = vec![0usize; 2 * k];
    let mut distinct: Vec<usize> = Vec::with_capacity(2 * k);
    for b in 0..BATCHES {
        let used = if b + 1 == BATCHES { budget.sweeps - per_batch * (BATCHES - 1) } else { per_batch };
        // normalise so every batch mean is on the same scale
        let scale = 1.0 / used as f64;
        for _ in 0..used {
            chain.sweep()?;
            let labeling = chain.labeling();
            distinct.clear();
            for (j, &x) in w.iter().enumerate() {
                for (slot, id) in [(j, labeling.cluster_of(crate::Point::new(x, 0.0))), (k + j, labeling.end_cluster(x))] {
                    let pos = distinct.iter().position(|&d| d == id).unwrap_or_else(|| {
                        distinct.push(id);
                        distinct.len() - 1
                    });
                    endpoint_ids[slot] = pos;
                }
            }
            let c = distinct.len();
            let weight = scale / (1u64 << c) as f64;
            for colors in 0..1usize << c {
                let (mut eta, mut eta_end) = (0, 0);
                for j in 0..k {
                    eta |= (colors >> endpoint_ids[j] & 1) << j;
                    eta_end |= (colors >> endpoint_ids[k + j] & 1) << j;
                }
                num[b][eta * dim + eta_end] += weight;
                if eta == eta_end {
                    den[b] += weight;
                }
            }
        }
    }
    let mut values = Vec::with_capacity(dim * dim);
    let mut stderr = Vec::with_capacity(dim * dim);
    for e in 0..dim * dim {
        let column: Vec<f64> = num.iter().map(|row| row[e]).collect();
        let r = batch_ratio(&column, &den)?;
        values.push(r.value);
        stderr.push(r.stderr);
    }
    Ok(EstimatedMatrix { dimension: dim, values, stderr })
}

/// Full density matrix estimate (`W = V`, free boundary).
pub fn rc_density_matrix(params: &QuantumParams, budget: &McBudget) -> Result<EstimatedMatrix> {
    let all: Vec<usize> = (0..params.sites()).collect();
    rc_reduced_matrix(params, &all, budget)
}

/// One element `⟨η|ρ|η'⟩` with its standard error.
pub fn rc_density_element(eta: usize, eta_end: usize, params: &QuantumParams, budget: &McBudget) -> Result<(f64, f64)> {
    let m = rc_density_matrix(params, budget)?;
    ensure!(eta < m.dimension && eta_end < m.dimension, "basis index out of range");
    Ok((m.value(eta, eta_end), m.error(eta, eta_end)))
}

/// One element of the reduced matrix on `w`.
pub fn rc_reduced_element(eta: usize, eta_end: usize, params: &QuantumParams, w: &[usize], budget: &McBudget) -> Result<(f64, f64)> {
    let m = rc_reduced_matrix(params, w, budget)?;
    ensure!(eta < m.dimension && eta_end < m.dimension, "basis index out of range");
    Ok((m.value(eta, eta_end), m.error(eta, eta_end)))
}

/// Comparison of one estimated element with its exact value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub object: String,
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub z: f64,
}

/// `(estimate - exact) / stderr`. Differences below `1e-12` are rounding
/// (some elements are exact for every sample) and score 0.
pub fn z_score(estimate: f64, exact: f64, stderr: f64) -> f64 {
    let diff = estimate - exact;
    if diff.abs() < 1e-12 {
        0.0
    } else if stderr > 0.0 {
        diff / stderr
    } else {
        f64::INFINITY * diff.signum()
    }
}

/// Exact reduced Gibbs state on `w` next to its random-cluster estimate, one
/// record per element.
pub fn validate_reduced(params: &QuantumParams, w: &[usize], budget: &McBudget, label: &str) -> Result<Vec<ValidationRecord>> {
    let exact = reduced_density(&gibbs_operator(&build_hamiltonian(params)?, params.beta)?, w)?;
    let est = rc_reduced_matrix(params, w, budget)?;
    let mut out = Vec::with_capacity(est.values.len());
    for a in 0..est.dimension {
        for b in 0..est.dimension {
            let (x, e, s) = (exact.get(a, b), est.value(a, b), est.error(a, b));
            out.push(ValidationRecord { object: format!("{label} rho[{a},{b}]"), exact: x, estimate: e, stderr: s, z: z_score(e, x, s) });
        }
    }
    Ok(out)
}

/// How the two reduced matrices of a norm difference are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMode {
    /// Ground-state projection.
    Ground,
    /// Exact Gibbs state at inverse temperature `β`.
    Gibbs(f64),
    /// Random-cluster estimates at inverse temperature `β`.
    MonteCarlo(f64, McBudget),
}

/// Path `[-m, m + L]` with the kept block `[0, L]`.
pub fn chain_block(l: usize, m: usize) -> Result<(Graph, Vec<usize>)> {
    let graph = Graph::path(l + 2 * m + 1)?;
    Ok((graph, (m..=m + l).collect()))
}

fn block_state(l: usize, m: usize, lambda: f64, delta: f64, mode: NormMode) -> Result<DMatrix<f64>> {
    let (graph, w) = chain_block(l, m)?;
    match mode {
        NormMode::Ground => {
            let p = QuantumParams::new(graph, lambda, delta, 1.0)?;
            let (rho, degenerate) = ground_state_density(&p, &w)?;
            if degenerate {
                return Err(Error::Numeric("degenerate ground state has no unique reduced state".into()));
            }
            Ok(rho.matrix().clone())
        }
        NormMode::Gibbs(beta) => {
            let p = QuantumParams::new(graph, lambda, delta, beta)?;
            Ok(reduced_density(&gibbs_operator(&build_hamiltonian(&p)?, beta)?, &w)?.matrix().clone())
        }
        NormMode::MonteCarlo(beta, budget) => {
            let p = QuantumParams::new(graph, lambda, delta, beta)?;
            Ok(rc_reduced_matrix(&p, &w, &budget)?.to_matrix())
        }
    }
}

/// `‖ρ_m^L - ρ_n^L‖` as the largest absolute eigenvalue of the symmetrised
/// difference.
pub fn norm_difference(l: usize, m: usize, n: usize, lambda: f64, delta: f64, mode: NormMode) -> Result<f64> {
    ensure!(l >= 1, "block length must be at least 1");
    if let NormMode::Gibbs(_) = mode {
        let size = l + 2 * m.max(n) + 1;
        if size > DENSE_CAP {
            return Err(Error::Capacity(format!("{size} spins exceed the dense limit of {DENSE_CAP}")));
        }
    }
    if m == n {
        return Ok(0.0);
    }
    let d = block_state(l, m, lambda, delta, mode)? - block_state(l, n, lambda, delta, mode)?;
    let sym = (&d + d.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.amax())
}
