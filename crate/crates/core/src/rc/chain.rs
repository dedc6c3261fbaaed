use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spin::{color_clusters, SpinField};
use crate::connectivity::{build_clusters, ClusterLabeling};
use crate::error::{ensure, Result};
use crate::rng::StreamRng;
use crate::spacetime::sampling::{sample_bridge_proposals, sample_cut_lines};
use crate::spacetime::{sample_configuration, Configuration, IntensityEnvironment, SpaceTimeBox};

/// Parameters of the `q`-weighted random-cluster chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcParams {
    /// Bridge rate per edge.
    pub lambda: f64,
    /// Cut rate per line.
    pub delta: f64,
    pub q: u8,
    pub burn_in: usize,
    pub sweeps: usize,
}

impl RcParams {
    pub fn new(lambda: f64, delta: f64, q: u8) -> Self {
        RcParams { lambda, delta, q, burn_in: 1_000, sweeps: 10_000 }
    }

    pub fn with_budget(mut self, burn_in: usize, sweeps: usize) -> Self {
        self.burn_in = burn_in;
        self.sweeps = sweeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda.is_finite() && self.lambda >= 0.0, "bridge rate must be finite and nonnegative, got {}", self.lambda);
        ensure!(self.delta.is_finite() && self.delta > 0.0, "cut rate must be finite and positive, got {}", self.delta);
        ensure!(self.q >= 1, "q must be at least 1");
        ensure!(self.sweeps >= 1, "at least one sweep is required");
        Ok(())
    }

    pub fn environment(&self) -> IntensityEnvironment {
        IntensityEnvironment::homogeneous(self.lambda, self.delta)
    }
}

/// A configuration together with a spin field constant on its clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct RcState {
    pub config: Configuration,
    pub spins: SpinField,
}

/// Initial state: a percolation sample coloured uniformly.
pub fn initial_state<R: Rng + ?Sized>(bx: &SpaceTimeBox, params: &RcParams, rng: &mut R) -> Result<(RcState, ClusterLabeling)> {
    params.validate()?;
    let config = sample_configuration(bx, &params.environment(), rng)?;
    let labeling = build_clusters(&config, bx)?;
    let spins = color_clusters(&labeling, &config, params.q, rng)?;
    Ok((RcState { config, spins }, labeling))
}

/// One Swendsen–Wang alternation.
///
/// Given the spins, cuts are the spin jumps plus fresh Poisson(δ) points,
/// and bridges are Poisson(λ) points kept only where the two endpoint spins
/// agree. The clusters of the new configuration are then recoloured. For
/// `q == 1` the draws coincide with [`sample_configuration`].
pub fn sw_sweep<R: Rng + ?Sized>(state: &RcState, bx: &SpaceTimeBox, params: &RcParams, rng: &mut R) -> Result<(RcState, ClusterLabeling)> {
    state.spins.check_consistent(&state.config, bx)?;
    let env = params.environment();
    env.validate(bx)?;
    let mut cuts = sample_cut_lines(bx, &env, rng);
    for (x, line) in cuts.iter_mut().enumerate() {
        let jumps = state.spins.jumps(x);
        if !jumps.is_empty() {
            line.extend_from_slice(jumps);
            line.sort_by(f64::total_cmp);
            line.dedup();
        }
    }
    let spins = &state.spins;
    let bridges = sample_bridge_proposals(bx, &env, false, &cuts, false, rng)
        .into_iter()
        .map(|(b, _)| b)
        .filter(|b| spins.at(b.from, b.time) == spins.at(b.to, b.time))
        .collect();
    let config = Configuration::from_sorted_parts(cuts, bridges, false);
    let labeling = build_clusters(&config, bx)?;
    let spins = color_clusters(&labeling, &config, params.q, rng)?;
    Ok((RcState { config, spins }, labeling))
}

/// A running chain with its own random stream.
#[derive(Debug, Clone)]
pub struct RcChain {
    bx: SpaceTimeBox,
    params: RcParams,
    state: RcState,
    labeling: ClusterLabeling,
    rng: StreamRng,
    completed: u64,
}

impl RcChain {
    pub fn new(bx: SpaceTimeBox, params: RcParams, mut rng: StreamRng) -> Result<Self> {
        let (state, labeling) = initial_state(&bx, &params, &mut rng)?;
        Ok(RcChain { bx, params, state, labeling, rng, completed: 0 })
    }

    /// Resumes from a saved state and stream position.
    pub fn resume(bx: SpaceTimeBox, params: RcParams, state: RcState, rng: StreamRng, completed: u64) -> Result<Self> {
        params.validate()?;
        state.spins.check_consistent(&state.config, &bx)?;
        let labeling = build_clusters(&state.config, &bx)?;
        Ok(RcChain { bx, params, state, labeling, rng, completed })
    }

    pub fn sweep(&mut self) -> Result<()> {
        let (state, labeling) = sw_sweep(&self.state, &self.bx, &self.params, &mut self.rng)?;
        self.state = state;
        self.labeling = labeling;
        self.completed += 1;
        Ok(())
    }

    pub fn run(&mut self, sweeps: usize) -> Result<()> {
        for _ in 0..sweeps {
            self.sweep()?;
        }
        Ok(())
    }

    pub fn state(&self) -> &RcState {
        &self.state
    }

    pub fn labeling(&self) -> &ClusterLabeling {
        &self.labeling
    }

    pub fn params(&self) -> &RcParams {
        &self.params
    }

    pub fn space_time_box(&self) -> &SpaceTimeBox {
        &self.bx
    }

    pub fn rng(&self) -> &StreamRng {
        &self.rng
    }

    pub fn completed_sweeps(&self) -> u64 {
        self.completed
    }
}

/// State after `burn_in + sweeps` sweeps from the uniformly coloured
/// percolation start.
pub fn sample_rc(bx: &SpaceTimeBox, params: &RcParams, rng: StreamRng) -> Result<RcState> {
    let mut chain = RcChain::new(bx.clone(), *params, rng)?;
    chain.run(params.burn_in + params.sweeps)?;
    Ok(chain.state)
}
