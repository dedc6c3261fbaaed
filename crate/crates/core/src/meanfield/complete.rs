use rand::Rng;

use super::branching::sample_cut_count;
use crate::connectivity::{build_clusters, ClusterLabeling};
use crate::error::{ensure, Error, Result};
use crate::graph::Graph;
use crate::rc::{RcChain, RcParams};
use crate::rng::StreamRng;
use crate::spacetime::sampling::sample_bridge_proposals;
use crate::spacetime::{sample_configuration, Boundary, Configuration, IntensityEnvironment, SpaceTimeBox};

/// Largest `n` simulated for `q = 1`.
pub const CAP_PERCOLATION: usize = 5_000;
/// Largest `n` simulated for `q ≥ 2`.
pub const CAP_WEIGHTED: usize = 500;

/// A configuration on `K_n × [0, β]` with identified time ends.
#[derive(Debug, Clone)]
pub struct MeanFieldSample {
    pub n: usize,
    pub beta: f64,
    pub config: Configuration,
    pub labeling: ClusterLabeling,
    /// Largest cluster measure `M`.
    pub max_measure: f64,
}

impl MeanFieldSample {
    fn new(n: usize, beta: f64, config: Configuration, bx: &SpaceTimeBox) -> Result<Self> {
        let labeling = build_clusters(&config, bx)?;
        let max_measure = labeling.max_measure();
        Ok(MeanFieldSample { n, beta, config, labeling, max_measure })
    }

    /// `M / n`.
    pub fn giant_fraction(&self) -> f64 {
        self.max_measure / self.n as f64
    }
}

fn complete_box(n: usize, beta: f64) -> Result<SpaceTimeBox> {
    ensure!(n >= 2, "K_n needs at least two vertices");
    SpaceTimeBox::new(Graph::complete(n)?, beta, Boundary::PeriodicAll)
}

/// Sweeps used by the `q ≥ 2` chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBudget {
    pub burn_in: usize,
}

impl Default for ChainBudget {
    fn default() -> Self {
        ChainBudget { burn_in: 200 }
    }
}

/// The `q`-weighted model on `K_n × [0, β]` with cut rate 1 and bridge rate
/// `λ/n` per pair: direct sampling for `q = 1`, otherwise the state of a
/// Swendsen–Wang chain after `budget.burn_in` sweeps.
pub fn simulate_complete_graph(n: usize, beta: f64, lambda: f64, q: u8, budget: ChainBudget, rng: StreamRng) -> Result<MeanFieldSample> {
    ensure!(q >= 1, "q must be at least 1");
    let cap = if q == 1 { CAP_PERCOLATION } else { CAP_WEIGHTED };
    if n > cap {
        return Err(Error::Capacity(format!("n = {n} exceeds the limit {cap} for q = {q}")));
    }
    let bx = complete_box(n, beta)?;
    let rate = lambda / n as f64;
    if q == 1 {
        let mut rng = rng;
        let config = sample_configuration(&bx, &IntensityEnvironment::homogeneous(rate, 1.0), &mut rng)?;
        return MeanFieldSample::new(n, beta, config, &bx);
    }
    let params = RcParams { lambda: rate, delta: 1.0, q, burn_in: budget.burn_in, sweeps: 1 };
    let mut chain = RcChain::new(bx.clone(), params, rng)?;
    chain.run(budget.burn_in.max(1))?;
    let config = chain.state().config.clone();
    MeanFieldSample::new(n, beta, config, &bx)
}

/// Product random-cluster model: independent lines with the `q`-weighted
/// cut law and Poisson bridges at rate `(λ/q)/n` per pair. Real `q ≥ 1` is
/// allowed.
pub fn sample_product_rc_model<R: Rng + ?Sized>(n: usize, beta: f64, lambda: f64, q: f64, rng: &mut R) -> Result<MeanFieldSample> {
    ensure!(q.is_finite() && q >= 1.0, "q must be at least 1");
    ensure!(lambda.is_finite() && lambda >= 0.0, "λ must be finite and nonnegative");
    if n > CAP_PERCOLATION {
        return Err(Error::Capacity(format!("n = {n} exceeds the limit {CAP_PERCOLATION}")));
    }
    let bx = complete_box(n, beta)?;
    let mut cuts = Vec::with_capacity(n);
    for _ in 0..n {
        let d = sample_cut_count(beta, q, rng)?;
        let mut line: Vec<f64> = Vec::with_capacity(d);
        while line.len() < d {
            let t = rng.random::<f64>() * beta;
            if t > 0.0 && !line.contains(&t) {
                line.push(t);
            }
        }
        line.sort_by(f64::total_cmp);
        cuts.push(line);
    }
    let env = IntensityEnvironment::homogeneous(lambda / q / n as f64, 1.0);
    let bridges = sample_bridge_proposals(&bx, &env, false, &cuts, false, rng).into_iter().map(|(b, _)| b).collect();
    MeanFieldSample::new(n, beta, Configuration::from_sorted_parts(cuts, bridges, false), &bx)
}
