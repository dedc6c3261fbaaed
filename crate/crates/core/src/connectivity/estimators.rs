//! Monte Carlo estimators on finite lattice boxes.
//!
//! "Percolation" is proxied on a finite box by the radius-crossing event
//! `{rad(C) ≥ R}`, so every estimate here is a finite-`R` curve (an upper
//! proxy for `θ`), never a point estimate of the infinite-volume quantity.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_clusters, cluster_at, directed_reach};
use crate::error::{ensure, Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Role, StreamRng};
use crate::spacetime::{
    sample_configuration, sample_directed_configuration, sample_environment, Boundary, Point, RateLaw,
    SpaceTimeBox,
};
use crate::stats::{normal_quantile, proportion, weighted_line_fit};

/// `[-r, r]^d × [0, 2h]` with the origin at the centre `(0, h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub dim: usize,
    pub spatial_radius: usize,
    pub time_half_height: f64,
}

impl LatticeBox {
    pub fn new(dim: usize, spatial_radius: usize, time_half_height: f64) -> Self {
        LatticeBox { dim, spatial_radius, time_half_height }
    }

    pub fn build(&self) -> Result<(SpaceTimeBox, Point)> {
        ensure!(self.time_half_height > 0.0, "time half-height must be positive");
        let graph = Graph::lattice_box(self.dim, self.spatial_radius)?;
        let bx = SpaceTimeBox::new(graph, 2.0 * self.time_half_height, Boundary::Free)?;
        let origin = Point::new(Graph::lattice_centre(self.dim, self.spatial_radius), self.time_half_height);
        Ok((bx, origin))
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        ensure!(r > 0.0, "radius must be positive");
        ensure!(
            r <= self.spatial_radius as f64 && r <= self.time_half_height,
            "radius {r} exceeds the box (spatial radius {}, time half-height {})",
            self.spatial_radius,
            self.time_half_height
        );
        Ok(())
    }
}

/// I.i.d. environment laws; point masses give the homogeneous model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentModel {
    pub cut_law: RateLaw,
    pub bridge_law: RateLaw,
}

impl EnvironmentModel {
    pub fn homogeneous(bridge_rate: f64, cut_rate: f64) -> Self {
        EnvironmentModel {
            cut_law: RateLaw::PointMass { value: cut_rate },
            bridge_law: RateLaw::PointMass { value: bridge_rate },
        }
    }
}

/// Statistics of the origin cluster of one replica.
#[derive(Debug, Clone, Copy)]
struct OriginStats {
    measure: f64,
    radius: f64,
    spatial: f64,
    temporal: f64,
}

/// One replica: fresh environment (annealed), fresh configuration.
fn origin_stats(bx: &SpaceTimeBox, origin: Point, env: &EnvironmentModel, directed: bool, rng: &mut StreamRng) -> Result<OriginStats> {
    let environment = sample_environment(&env.cut_law, &env.bridge_law, bx, rng)?;
    if directed {
        let config = sample_directed_configuration(bx, &environment, rng)?;
        let d = directed_reach(&config, bx, origin)?;
        let dist = bx.graph().distances_from(origin.vertex);
        let spatial = d.pieces.iter().map(|p| dist[p.vertex] as f64).fold(0.0, f64::max);
        let temporal = d.pieces.iter().map(|p| p.end.min(bx.time_length()) - origin.time).fold(0.0, f64::max);
        Ok(OriginStats { measure: d.measure(), radius: d.radius(bx), spatial, temporal })
    } else {
        let config = sample_configuration(bx, &environment, rng)?;
        let labeling = build_clusters(&config, bx)?;
        let info = cluster_at(&labeling, bx, origin)?;
        Ok(OriginStats {
            measure: info.measure,
            radius: info.radius,
            spatial: info.spatial_extent,
            temporal: info.temporal_extent,
        })
    }
}

fn replicas(lattice: &LatticeBox, env: &EnvironmentModel, directed: bool, trials: usize, seed: u64) -> Result<Vec<OriginStats>> {
    ensure!(trials > 0, "at least one trial is required");
    let (bx, origin) = lattice.build()?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| origin_stats(&bx, origin, env, directed, &mut stream(seed, i, Role::Estimator)))
        .collect()
}

/// Frequency of `{rad(C) ≥ R}` with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaEstimate {
    pub radius: f64,
    pub trials: usize,
    pub successes: usize,
    pub estimate: f64,
    pub stderr: f64,
}

/// Radius-crossing frequency of the origin cluster (directed cluster when
/// `directed`) at one radius.
pub fn estimate_theta(lattice: &LatticeBox, env: &EnvironmentModel, directed: bool, radius: f64, trials: usize, seed: u64) -> Result<ThetaEstimate> {
    Ok(estimate_theta_curve(lattice, env, directed, &[radius], trials, seed)?.remove(0))
}

/// Radius-crossing frequencies at several radii from the same replicas, so
/// the curve is monotone in `R` sample by sample.
pub fn estimate_theta_curve(
    lattice: &LatticeBox,
    env: &EnvironmentModel,
    directed: bool,
    radii: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<ThetaEstimate>> {
    ensure!(!radii.is_empty(), "radius grid is empty");
    for &r in radii {
        lattice.check_radius(r)?;
    }
    let stats = replicas(lattice, env, directed, trials, seed)?;
    Ok(radii
        .iter()
        .map(|&r| {
            let successes = stats.iter().filter(|s| s.radius >= r).count();
            let (estimate, stderr) = proportion(successes, trials);
            ThetaEstimate { radius: r, trials, successes, estimate, stderr }
        })
        .collect())
}

/// Log-linear decay fit of a survival curve `P(X ≥ x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    /// Minus the fitted slope of `log P(X ≥ x)`; positive means decay.
    pub rate: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub residuals: Vec<f64>,
    /// `(x, successes)` for every grid cell, including empty ones.
    pub cells: Vec<(f64, usize)>,
    pub trials: usize,
}

fn survival_fit(values: &[f64], grid: &[f64], trials: usize) -> Result<SlopeFit> {
    let cells: Vec<(f64, usize)> = grid.iter().map(|&x| (x, values.iter().filter(|&&v| v >= x).count())).collect();
    fit_cells(cells, trials)
}

fn fit_cells(cells: Vec<(f64, usize)>, trials: usize) -> Result<SlopeFit> {
    let used: Vec<&(f64, usize)> = cells.iter().filter(|(_, c)| *c > 0).collect();
    if used.is_empty() {
        return Err(Error::InsufficientData("no survivors in any grid cell".into()));
    }
    if used.len() < 2 {
        return Err(Error::InsufficientData("fewer than two nonempty grid cells".into()));
    }
    let n = trials as f64;
    let x: Vec<f64> = used.iter().map(|c| c.0).collect();
    let y: Vec<f64> = used.iter().map(|c| (c.1 as f64 / n).ln()).collect();
    // delta-method variance of log p̂, floored for p̂ = 1
    let w: Vec<f64> = used
        .iter()
        .map(|c| {
            let p = c.1 as f64 / n;
            1.0 / ((1.0 - p) / (n * p)).max(1.0 / (n * n))
        })
        .collect();
    let fit = weighted_line_fit(&x, &y, &w)?;
    let z = normal_quantile(0.975);
    let rate = -fit.slope;
    Ok(SlopeFit {
        rate,
        stderr: fit.slope_stderr,
        ci95: (rate - z * fit.slope_stderr, rate + z * fit.slope_stderr),
        residuals: fit.residuals,
        cells,
        trials,
    })
}

/// Decay fit of a radius-crossing curve from [`estimate_theta_curve`].
pub fn fit_theta_curve(curve: &[ThetaEstimate]) -> Result<SlopeFit> {
    let trials = curve.first().map_or(0, |c| c.trials);
    ensure!(curve.iter().all(|c| c.trials == trials), "curve points must share one trial count");
    let cells: Vec<(f64, usize)> = curve.iter().map(|c| (c.radius, c.successes)).collect();
    fit_cells(cells, trials)
}

/// Decay fits for `P(|C| ≥ k)` and `P(rad(C) ≥ r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub size: SlopeFit,
    pub radius: SlopeFit,
}

pub fn estimate_decay_rates(
    lattice: &LatticeBox,
    env: &EnvironmentModel,
    size_grid: &[f64],
    radius_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<DecayFit> {
    for &r in radius_grid {
        lattice.check_radius(r)?;
    }
    let stats = replicas(lattice, env, false, trials, seed)?;
    let sizes: Vec<f64> = stats.iter().map(|s| s.measure).collect();
    let radii: Vec<f64> = stats.iter().map(|s| s.radius).collect();
    Ok(DecayFit { size: survival_fit(&sizes, size_grid, trials)?, radius: survival_fit(&radii, radius_grid, trials)? })
}

/// Decay of the spatial extent `sup ‖x‖` and the temporal extent
/// `sup |t - s|` of the origin cluster, fitted separately.
pub fn estimate_extent_decay(
    lattice: &LatticeBox,
    env: &EnvironmentModel,
    space_grid: &[f64],
    time_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<(SlopeFit, SlopeFit)> {
    let stats = replicas(lattice, env, false, trials, seed)?;
    let space: Vec<f64> = stats.iter().map(|s| s.spatial).collect();
    let time: Vec<f64> = stats.iter().map(|s| s.temporal).collect();
    Ok((survival_fit(&space, space_grid, trials)?, survival_fit(&time, time_grid, trials)?))
}

/// `max{‖x - y‖, [log(1 + |s - t|)]^q}`.
pub fn d_q(spatial: f64, dt: f64, q: f64) -> f64 {
    spatial.max((1.0 + dt.abs()).ln().powf(q))
}

/// Connection frequency in one `d_q` bin `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DqBin {
    pub lo: f64,
    pub hi: f64,
    pub pairs: usize,
    pub connected: usize,
    pub frequency: f64,
}

/// Frequency of `(x,s) ↔ (y,t)` binned by `d_q`. Each trial samples an
/// environment and a configuration, then draws `pairs_per_trial` point
/// pairs with `pair_source`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_two_point_dq<F>(
    lattice: &LatticeBox,
    env: &EnvironmentModel,
    q: f64,
    bin_edges: &[f64],
    pairs_per_trial: usize,
    trials: usize,
    seed: u64,
    pair_source: F,
) -> Result<Vec<DqBin>>
where
    F: Fn(&SpaceTimeBox, &mut StreamRng) -> (Point, Point) + Sync,
{
    ensure!(q >= 1.0, "q must be at least 1");
    ensure!(bin_edges.len() >= 2 && bin_edges.windows(2).all(|w| w[0] < w[1]), "bin edges must increase");
    let (bx, _) = lattice.build()?;
    let per_trial: Vec<Vec<(usize, bool)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, bool)>> {
            let mut rng = stream(seed, i, Role::Estimator);
            let environment = sample_environment(&env.cut_law, &env.bridge_law, &bx, &mut rng)?;
            let config = sample_configuration(&bx, &environment, &mut rng)?;
            let labeling = build_clusters(&config, &bx)?;
            let mut out = Vec::with_capacity(pairs_per_trial);
            for _ in 0..pairs_per_trial {
                let (a, b) = pair_source(&bx, &mut rng);
                let spatial = bx.graph().distances_from(a.vertex)[b.vertex] as f64;
                let d = d_q(spatial, b.time - a.time, q);
                let bin = bin_edges.partition_point(|&e| e <= d);
                if bin == 0 || bin == bin_edges.len() {
                    continue;
                }
                out.push((bin - 1, labeling.connected(a, b)));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut bins: Vec<DqBin> = bin_edges
        .windows(2)
        .map(|w| DqBin { lo: w[0], hi: w[1], pairs: 0, connected: 0, frequency: f64::NAN })
        .collect();
    for (b, c) in per_trial.into_iter().flatten() {
        bins[b].pairs += 1;
        bins[b].connected += usize::from(c);
    }
    for b in &mut bins {
        if b.pairs > 0 {
            b.frequency = b.connected as f64 / b.pairs as f64;
        }
    }
    Ok(bins)
}

/// Uniform second point with the first fixed at the box centre.
pub fn pairs_from_centre(lattice: &LatticeBox) -> impl Fn(&SpaceTimeBox, &mut StreamRng) -> (Point, Point) + Sync {
    let centre = Point::new(Graph::lattice_centre(lattice.dim, lattice.spatial_radius), lattice.time_half_height);
    move |bx, rng| {
        let y = rng.random_range(0..bx.vertex_count());
        let t = rng.random::<f64>() * bx.time_length();
        (centre, Point::new(y, t))
    }
}
