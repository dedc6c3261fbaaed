use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::basis::{join_index, spin, split_index};
use crate::error::{ensure, Error, Result};
use crate::graph::Graph;

/// Largest system handled by dense linear algebra.
pub const DENSE_CAP: usize = 12;
/// Largest system handled by the sparse ground-state solver.
pub const SPARSE_CAP: usize = 20;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// Transverse-field Ising model `H = -(λ/2) Σ Z_x Z_y - δ Σ X_x` on a graph
/// at inverse temperature `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    #[serde(skip, default = "Graph::single_vertex")]
    pub graph: Graph,
    pub lambda: f64,
    pub delta: f64,
    pub beta: f64,
}

impl QuantumParams {
    pub fn new(graph: Graph, lambda: f64, delta: f64, beta: f64) -> Result<Self> {
        let p = QuantumParams { graph, lambda, delta, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda.is_finite() && self.lambda >= 0.0, "coupling must be finite and nonnegative, got {}", self.lambda);
        ensure!(self.delta.is_finite() && self.delta >= 0.0, "transverse field must be finite and nonnegative, got {}", self.delta);
        ensure!(self.beta.is_finite() && self.beta > 0.0, "inverse temperature must be finite and positive, got {}", self.beta);
        ensure!(!self.graph.is_complete(), "quantum models need an explicit graph");
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Diagonal of the coupling term in the product basis.
    pub(crate) fn diagonal(&self) -> Vec<f64> {
        let edges: Vec<(usize, usize)> = self.graph.edges().collect();
        (0..1usize << self.sites())
            .map(|i| -0.5 * self.lambda * edges.iter().map(|&(x, y)| spin(i, x) * spin(i, y)).sum::<f64>())
            .collect()
    }

    /// `out = H v` without forming `H`.
    pub(crate) fn apply(&self, diag: &[f64], v: &[f64], out: &mut [f64]) {
        let n = self.sites();
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = diag[i] * v[i];
            for x in 0..n {
                acc -= self.delta * v[i ^ (1 << x)];
            }
            *o = acc;
        }
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        return Err(Error::Capacity(format!("{n} spins exceed the dense limit of {DENSE_CAP}")));
    }
    Ok(())
}

pub fn build_hamiltonian(params: &QuantumParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    let n = params.sites();
    check_dense(n)?;
    let dim = 1usize << n;
    let diag = params.diagonal();
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = diag[i];
        for x in 0..n {
            h[(i, i ^ (1 << x))] -= params.delta;
        }
    }
    Ok(h)
}

/// Real symmetric, positive semidefinite, unit-trace matrix on `2^k`
/// basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<f64>,
}

impl DensityOperator {
    /// Validates symmetry, positivity and normalisation.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::NotAState(format!("{}x{} is not a square power-of-two matrix", dim, matrix.ncols())));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotAState(format!("asymmetry {asym:e}")));
        }
        let trace = matrix.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotAState(format!("trace {trace}")));
        }
        let min = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
        if min < -PSD_TOL {
            return Err(Error::NotAState(format!("eigenvalue {min:e}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Symmetrises away rounding before validating.
    pub(crate) fn from_rounded(matrix: DMatrix<f64>) -> Result<Self> {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        DensityOperator::new(sym)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn sites(&self) -> usize {
        self.dimension().trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect()
    }

    /// Row-major CSV, one row per line.
    pub fn to_csv(&self) -> String {
        matrix_csv(&self.matrix)
    }
}

pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.17e}", m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `e^{-βH} / tr e^{-βH}` through the eigendecomposition of `H`.
pub fn gibbs_operator(h: &DMatrix<f64>, beta: f64) -> Result<DensityOperator> {
    ensure!(h.is_square(), "Hamiltonian must be square");
    ensure!((h - h.transpose()).amax() <= SYMMETRY_TOL, "Hamiltonian must be symmetric");
    ensure!(beta.is_finite() && beta > 0.0, "inverse temperature must be finite and positive");
    let eig = SymmetricEigen::new(h.clone());
    let e0 = eig.eigenvalues.min();
    let w = eig.eigenvalues.map(|e| (-beta * (e - e0)).exp());
    let z = w.sum();
    let u = &eig.eigenvectors;
    let rho = u * DMatrix::from_diagonal(&(w / z)) * u.transpose();
    DensityOperator::from_rounded(rho)
}

fn check_subset(w: &[usize], n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    ensure!(!w.is_empty(), "the kept subsystem must be nonempty");
    let mut sorted = w.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    ensure!(sorted.len() == w.len(), "kept sites must be distinct");
    ensure!(sorted.iter().all(|&x| x < n), "kept site out of range");
    let rest = (0..n).filter(|x| sorted.binary_search(x).is_err()).collect();
    Ok((sorted, rest))
}

/// Partial trace over the sites outside `w`; the result uses the basis over
/// `w` in increasing site order.
pub fn reduced_density(rho: &DensityOperator, w: &[usize]) -> Result<DensityOperator> {
    let (w, rest) = check_subset(w, rho.sites())?;
    let (dw, dr) = (1usize << w.len(), 1usize << rest.len());
    let m = rho.matrix();
    let out = DMatrix::from_fn(dw, dw, |a, b| (0..dr).map(|r| m[(join_index(a, r, &w, &rest), join_index(b, r, &w, &rest))]).sum());
    DensityOperator::from_rounded(out)
}

/// Von Neumann entropy in bits; eigenvalues below `1e-14` count as zero.
pub fn entanglement_entropy(rho: &DensityOperator) -> Result<f64> {
    let mut s = 0.0;
    for p in rho.eigenvalues() {
        if p < -1e-8 {
            return Err(Error::NotAState(format!("eigenvalue {p:e}")));
        }
        if p > 1e-14 {
            s -= p * p.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Lowest eigenpair and the gap to the next level.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: DVector<f64>,
    pub gap: f64,
    /// Set when the gap is below `1e-10`: the projector is then one of
    /// several ground states and not the zero-temperature limit.
    pub degenerate: bool,
}

/// Ground state by dense diagonalisation for small systems and by Lanczos
/// iteration beyond that.
pub fn ground_state(params: &QuantumParams) -> Result<GroundState> {
    params.validate()?;
    let n = params.sites();
    if n > SPARSE_CAP {
        return Err(Error::Capacity(format!("{n} spins exceed the sparse limit of {SPARSE_CAP}")));
    }
    let (energy, vector, next) = if n <= 10 {
        let eig = SymmetricEigen::new(build_hamiltonian(params)?);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let next = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i]);
        (eig.eigenvalues[order[0]], eig.eigenvectors.column(order[0]).into_owned(), next)
    } else {
        let diag = params.diagonal();
        let (e0, v0) = lanczos(params, &diag, None)?;
        let (e1, _) = lanczos(params, &diag, Some(&v0))?;
        (e0, v0, e1)
    };
    let gap = next - energy;
    Ok(GroundState { energy, vector, gap, degenerate: gap < 1e-10 })
}

/// Lowest eigenpair of `H`, restricted to the complement of `deflate`.
fn lanczos(params: &QuantumParams, diag: &[f64], deflate: Option<&DVector<f64>>) -> Result<(f64, DVector<f64>)> {
    let dim = diag.len();
    let project = |v: &mut DVector<f64>| {
        if let Some(d) = deflate {
            let c = d.dot(v);
            v.axpy(-c, d, 1.0);
        }
    };
    // deterministic start with weight on every basis state
    let mut v = DVector::from_fn(dim, |i, _| 1.0 + ((i as f64 * 0.618_033_988_749_895).fract() - 0.5) * 0.5);
    project(&mut v);
    v /= v.norm();
    let max_steps = dim.min(400);
    let mut basis: Vec<DVector<f64>> = vec![v];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut w = DVector::zeros(dim);
    let mut found = None;
    for step in 0..max_steps {
        params.apply(diag, basis[step].as_slice(), w.as_mut_slice());
        project(&mut w);
        alphas.push(basis[step].dot(&w));
        // full reorthogonalisation, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let beta = w.norm();
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |i, j| match i.abs_diff(j) {
            0 => alphas[i],
            1 => betas[i.min(j)],
            _ => 0.0,
        });
        let eig = SymmetricEigen::new(t);
        let imin = eig.eigenvalues.imin();
        let energy = eig.eigenvalues[imin];
        let residual = beta * eig.eigenvectors[(k - 1, imin)].abs();
        let exhausted = beta < 1e-13 || k == dim;
        if residual < 1e-12 * energy.abs().max(1.0) || exhausted || (k == max_steps && residual < 1e-8) {
            let mut vec = DVector::zeros(dim);
            for (i, b) in basis.iter().enumerate() {
                vec.axpy(eig.eigenvectors[(i, imin)], b, 1.0);
            }
            project(&mut vec);
            vec /= vec.norm();
            found = Some(vec);
            break;
        }
        betas.push(beta);
        basis.push(&w / beta);
    }
    let vec = found.ok_or_else(|| Error::Numeric("Lanczos iteration did not converge".into()))?;
    // Rayleigh quotient of the final vector
    let mut hv = vec![0.0; dim];
    params.apply(diag, vec.as_slice(), &mut hv);
    let rq = vec.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>();
    let resid = hv.iter().zip(vec.iter()).map(|(h, v)| (h - rq * v).powi(2)).sum::<f64>().sqrt();
    if resid > 1e-6 * rq.abs().max(1.0) {
        return Err(Error::Numeric(format!("Lanczos residual {resid:e} too large")));
    }
    Ok((rq, vec))
}

/// Reduced state on `w` of a pure state, `ΨΨᵀ` with `Ψ` the reshaped
/// amplitude vector.
pub fn pure_reduced_density(psi: &DVector<f64>, sites: usize, w: &[usize]) -> Result<DensityOperator> {
    ensure!(psi.len() == 1 << sites, "state vector has the wrong length");
    let (w, rest) = check_subset(w, sites)?;
    let (dw, dr) = (1usize << w.len(), 1usize << rest.len());
    let mut m = DMatrix::zeros(dw, dr);
    for (i, &amp) in psi.iter().enumerate() {
        let (a, r) = split_index(i, &w, &rest);
        m[(a, r)] = amp;
    }
    let norm2 = psi.norm_squared();
    DensityOperator::from_rounded(&m * m.transpose() / norm2)
}

/// Zero-temperature reduced state on `w`, with the degeneracy flag of the
/// ground state.
pub fn ground_state_density(params: &QuantumParams, w: &[usize]) -> Result<(DensityOperator, bool)> {
    let gs = ground_state(params)?;
    Ok((pure_reduced_density(&gs.vector, params.sites(), w)?, gs.degenerate))
}
