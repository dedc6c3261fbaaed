use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{parse_boundary, GraphSpec};
use super::output::{csv_table, RunOutput};
use crate::connectivity::{estimate_theta_curve, fit_theta_curve, EnvironmentModel, LatticeBox};
use crate::error::{ensure, Result};
use crate::meanfield::{
    lambda_c, mean_offspring, sample_product_rc_model, simulate_branching, simulate_complete_graph, survival_probability,
    ChainBudget, OffspringRate,
};
use crate::quantum::{
    build_hamiltonian, chain_block, entanglement_entropy, gibbs_operator, ground_state_density, matrix_csv, norm_difference,
    reduced_density, validate_reduced, McBudget, NormMode, QuantumParams,
};
use crate::rc::{write_checkpoint, RcChain, RcParams};
use crate::rng::{stream, Role};
use crate::spacetime::{Point, RateLaw, SpaceTimeBox};
use crate::stats::{batch_ratio, mean, proportion, variance};

fn one() -> f64 {
    1.0
}

fn default_dim() -> usize {
    1
}

/// Radius-crossing curves of the origin cluster, undirected
/// (`percolation-decay`) or directed (`contact`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusCurves {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub spatial_radius: usize,
    pub time_half_height: f64,
    /// Bridge rates of the homogeneous runs.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default = "one")]
    pub delta: f64,
    /// Random environment, e.g. `lognormal:0,1`; run in addition to the
    /// homogeneous rates.
    #[serde(default)]
    pub bridge_law: Option<String>,
    #[serde(default)]
    pub cut_law: Option<String>,
    pub radii: Vec<f64>,
    pub trials: usize,
}

#[derive(Serialize)]
struct FitSummary {
    param_set: String,
    rate: Option<f64>,
    stderr: Option<f64>,
    ci95: Option<(f64, f64)>,
    note: Option<String>,
}

pub(crate) fn run_radius_curves(p: &RadiusCurves, directed: bool, seed: u64) -> Result<RunOutput> {
    let lattice = LatticeBox::new(p.dim, p.spatial_radius, p.time_half_height);
    let mut models: Vec<(String, EnvironmentModel)> =
        p.lambdas.iter().map(|&l| (format!("lambda={l};delta={}", p.delta), EnvironmentModel::homogeneous(l, p.delta))).collect();
    if let Some(bl) = &p.bridge_law {
        let bridge_law: RateLaw = bl.parse()?;
        let cut_law = match &p.cut_law {
            Some(c) => c.parse()?,
            None => RateLaw::PointMass { value: p.delta },
        };
        models.push((format!("bridge={bridge_law};cut={cut_law}"), EnvironmentModel { cut_law, bridge_law }));
    }
    ensure!(!models.is_empty(), "give at least one bridge rate or a bridge law");
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (i, (label, env)) in models.iter().enumerate() {
        let curve = estimate_theta_curve(&lattice, env, directed, &p.radii, p.trials, seed.wrapping_add(i as u64))?;
        for c in &curve {
            rows.push(vec![
                label.clone(),
                c.radius.to_string(),
                c.trials.to_string(),
                c.successes.to_string(),
                c.estimate.to_string(),
                c.stderr.to_string(),
            ]);
        }
        fits.push(match fit_theta_curve(&curve) {
            Ok(f) => FitSummary { param_set: label.clone(), rate: Some(f.rate), stderr: Some(f.stderr), ci95: Some(f.ci95), note: None },
            Err(e) => FitSummary { param_set: label.clone(), rate: None, stderr: None, ci95: None, note: Some(e.to_string()) },
        });
    }
    let mut out = RunOutput::new();
    out.push("theta.csv", csv_table(&["param_set", "radius", "trials", "successes", "estimate", "stderr"], rows)?);
    out.push_json("fits.json", &fits)?;
    Ok(out)
}

fn default_boundary() -> String {
    "free".into()
}

fn default_chains() -> usize {
    2
}

/// Independent Swendsen–Wang chains with per-chain summaries and a final
/// checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcChainRun {
    pub graph: GraphSpec,
    pub time_length: f64,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    pub lambda: f64,
    #[serde(default = "one")]
    pub delta: f64,
    pub q: u8,
    pub burn_in: usize,
    pub sweeps: usize,
    #[serde(default = "default_chains")]
    pub chains: usize,
}

#[derive(Serialize)]
struct ChainSummary {
    chain: usize,
    mean_bridges: f64,
    mean_cuts: f64,
    mean_clusters: f64,
    mean_max_measure: f64,
    /// `P((0,0) ↔ (1,0))` and its batch-means error, when `|V| ≥ 2`.
    connectivity: Option<(f64, f64)>,
}

pub(crate) fn run_rc_chain(p: &RcChainRun, seed: u64) -> Result<RunOutput> {
    ensure!(p.chains >= 1, "at least one chain is required");
    ensure!(p.sweeps >= 32, "at least 32 sweeps are required for batch errors");
    let bx = SpaceTimeBox::new(p.graph.build()?, p.time_length, parse_boundary(&p.boundary)?)?;
    let params = RcParams { lambda: p.lambda, delta: p.delta, q: p.q, burn_in: p.burn_in, sweeps: p.sweeps };
    let results: Vec<(ChainSummary, Option<String>)> = (0..p.chains)
        .into_par_iter()
        .map(|c| -> Result<_> {
            let mut chain = RcChain::new(bx.clone(), params, stream(seed, c as u64, Role::Chain))?;
            chain.run(p.burn_in)?;
            let (mut bridges, mut cuts, mut clusters, mut max_m) = (0.0, 0.0, 0.0, 0.0);
            let mut conn = vec![0.0; 32];
            let per = p.sweeps / 32;
            for s in 0..p.sweeps {
                chain.sweep()?;
                let st = chain.state();
                bridges += st.config.bridge_count() as f64;
                cuts += st.config.cut_count() as f64;
                clusters += chain.labeling().cluster_count() as f64;
                max_m += chain.labeling().max_measure();
                if bx.vertex_count() >= 2 {
                    let joined = chain.labeling().connected(Point::new(0, 0.0), Point::new(1, 0.0));
                    conn[(s / per).min(31)] += f64::from(u8::from(joined));
                }
            }
            let n = p.sweeps as f64;
            let connectivity = if bx.vertex_count() >= 2 {
                let sizes: Vec<f64> = (0..32).map(|b| if b == 31 { (p.sweeps - 31 * per) as f64 } else { per as f64 }).collect();
                let r = batch_ratio(&conn, &sizes)?;
                Some((r.value, r.stderr))
            } else {
                None
            };
            let summary = ChainSummary {
                chain: c,
                mean_bridges: bridges / n,
                mean_cuts: cuts / n,
                mean_clusters: clusters / n,
                mean_max_measure: max_m / n,
                connectivity,
            };
            Ok((summary, (c == 0).then(|| write_checkpoint(&chain, seed))))
        })
        .collect::<Result<_>>()?;
    let rows = results.iter().map(|(s, _)| {
        vec![
            s.chain.to_string(),
            s.mean_bridges.to_string(),
            s.mean_cuts.to_string(),
            s.mean_clusters.to_string(),
            s.mean_max_measure.to_string(),
            s.connectivity.map_or(String::new(), |c| c.0.to_string()),
            s.connectivity.map_or(String::new(), |c| c.1.to_string()),
        ]
    });
    let mut out = RunOutput::new();
    out.push(
        "chains.csv",
        csv_table(&["chain", "mean_bridges", "mean_cuts", "mean_clusters", "mean_max_measure", "connectivity", "connectivity_stderr"], rows)?,
    );
    let summaries: Vec<&ChainSummary> = results.iter().map(|r| &r.0).collect();
    out.push_json("summary.json", &summaries)?;
    if let Some(Some(ckpt)) = results.first().map(|r| r.1.clone()) {
        out.push("chain0.checkpoint", ckpt);
    }
    Ok(out)
}

fn default_burn_in() -> usize {
    1_000
}

fn default_sweeps() -> usize {
    100_000
}

/// Random-cluster estimates of a (reduced) Gibbs state against exact
/// diagonalisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumValidate {
    pub graph: GraphSpec,
    pub lambda: f64,
    pub delta: f64,
    pub beta: f64,
    /// Kept sites; all sites when absent.
    #[serde(default)]
    pub kept: Option<Vec<usize>>,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
}

pub(crate) fn run_quantum_validate(p: &QuantumValidate, seed: u64) -> Result<RunOutput> {
    let params = QuantumParams::new(p.graph.build()?, p.lambda, p.delta, p.beta)?;
    let kept = p.kept.clone().unwrap_or_else(|| (0..params.sites()).collect());
    let budget = McBudget::new(p.burn_in, p.sweeps, seed);
    let records = validate_reduced(&params, &kept, &budget, &p.graph.to_string())?;
    let exact = reduced_density(&gibbs_operator(&build_hamiltonian(&params)?, p.beta)?, &kept)?;
    let dim = exact.dimension();
    let estimate = nalgebra::DMatrix::from_fn(dim, dim, |a, b| records[a * dim + b].estimate);
    let stderr = nalgebra::DMatrix::from_fn(dim, dim, |a, b| records[a * dim + b].stderr);
    let mut out = RunOutput::new();
    out.passed = Some(records.iter().all(|r| r.z.abs() <= 3.0));
    out.push_json("validation.json", &records)?;
    out.push("exact.csv", exact.to_csv());
    out.push("estimate.csv", matrix_csv(&estimate));
    out.push("stderr.csv", matrix_csv(&stderr));
    Ok(out)
}

fn default_lambda_small() -> f64 {
    0.2
}

fn default_blocks() -> Vec<usize> {
    (2..=6).collect()
}

fn default_margins() -> Vec<usize> {
    (0..=3).collect()
}

fn default_norm_block() -> usize {
    2
}

fn default_norm_reference() -> usize {
    4
}

/// Ground-state entanglement entropy of the block `[0, L]` inside
/// `[-m, m + L]`, and distances between the block states for growing `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementSweep {
    #[serde(default = "default_lambda_small")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "default_blocks")]
    pub block_lengths: Vec<usize>,
    #[serde(default = "default_margins")]
    pub margins: Vec<usize>,
    #[serde(default = "default_norm_block")]
    pub norm_block: usize,
    #[serde(default = "default_norm_reference")]
    pub norm_reference: usize,
}

/// `S_m^L` for every `(L, m)` pair, in row order `L` then `m`.
pub fn block_entropies(lambda: f64, delta: f64, ls: &[usize], ms: &[usize]) -> Result<Vec<(usize, usize, f64)>> {
    let pairs: Vec<(usize, usize)> = ls.iter().flat_map(|&l| ms.iter().map(move |&m| (l, m))).collect();
    pairs
        .into_par_iter()
        .map(|(l, m)| {
            let (graph, w) = chain_block(l, m)?;
            let p = QuantumParams::new(graph, lambda, delta, 1.0)?;
            let (rho, _) = ground_state_density(&p, &w)?;
            Ok((l, m, entanglement_entropy(&rho)?))
        })
        .collect()
}

pub(crate) fn run_entanglement_sweep(p: &EntanglementSweep) -> Result<RunOutput> {
    let entropies = block_entropies(p.lambda, p.delta, &p.block_lengths, &p.margins)?;
    let rows = entropies.iter().map(|&(l, m, s)| vec![l.to_string(), m.to_string(), (l + 2 * m + 1).to_string(), (l + 1).to_string(), s.to_string()]);
    let mut out = RunOutput::new();
    out.push("entropy.csv", csv_table(&["block_length", "margin", "sites", "kept_sites", "entropy_bits"], rows)?);
    let norms: Vec<(usize, f64)> = p
        .margins
        .par_iter()
        .filter(|&&m| m <= p.norm_reference)
        .map(|&m| Ok((m, norm_difference(p.norm_block, m, p.norm_reference, p.lambda, p.delta, NormMode::Ground)?)))
        .collect::<Result<_>>()?;
    let rows = norms.iter().map(|&(m, v)| vec![p.norm_block.to_string(), m.to_string(), p.norm_reference.to_string(), format!("{v:e}")]);
    out.push("norm.csv", csv_table(&["block_length", "margin", "reference_margin", "norm"], rows)?);
    Ok(out)
}

/// Which model `meanfield-giant` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MeanfieldModel {
    #[default]
    Weighted,
    Product,
}

fn default_q() -> f64 {
    1.0
}

fn default_mf_burn_in() -> usize {
    200
}

/// Largest cluster on `K_n × [0, β]` over a grid of bridge rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldGiant {
    pub beta: f64,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
    pub n: usize,
    pub replicas: usize,
    #[serde(default)]
    pub model: MeanfieldModel,
    #[serde(default = "default_mf_burn_in")]
    pub burn_in: usize,
}

/// Giant fractions `M/n` of independent replicas at one bridge rate.
pub fn giant_fractions(p: &MeanfieldGiant, lambda: f64, seed: u64, group: u64) -> Result<Vec<f64>> {
    ensure!(p.replicas >= 1, "at least one replica is required");
    if p.model == MeanfieldModel::Weighted {
        ensure!(p.q.fract() == 0.0 && (1.0..=255.0).contains(&p.q), "the weighted model needs an integer q, got {}", p.q);
    }
    (0..p.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let id = group << 24 | r;
            let s = match p.model {
                MeanfieldModel::Weighted => {
                    simulate_complete_graph(p.n, p.beta, lambda, p.q as u8, ChainBudget { burn_in: p.burn_in }, stream(seed, id, Role::Chain))?
                }
                MeanfieldModel::Product => sample_product_rc_model(p.n, p.beta, lambda, p.q, &mut stream(seed, id, Role::Configuration))?,
            };
            Ok(s.giant_fraction())
        })
        .collect()
}

pub(crate) fn run_meanfield_giant(p: &MeanfieldGiant, seed: u64) -> Result<RunOutput> {
    let rate = match p.model {
        MeanfieldModel::Weighted => OffspringRate::Upper,
        MeanfieldModel::Product => OffspringRate::Product,
    };
    let critical = lambda_c(p.beta, p.q)?;
    let mut rows = Vec::new();
    for (i, &lambda) in p.lambdas.iter().enumerate() {
        let fr = giant_fractions(p, lambda, seed, i as u64)?;
        let pi = survival_probability(p.beta, lambda, p.q, rate)?;
        rows.push(vec![
            lambda.to_string(),
            p.q.to_string(),
            p.n.to_string(),
            p.replicas.to_string(),
            mean(&fr).to_string(),
            variance(&fr).sqrt().to_string(),
            (p.beta * pi).to_string(),
            critical.value.to_string(),
        ]);
    }
    let mut out = RunOutput::new();
    out.push(
        "giant.csv",
        csv_table(&["lambda", "q", "n", "replicas", "mean_fraction", "sd_fraction", "beta_pi", "lambda_c"], rows)?,
    );
    Ok(out)
}

/// Survival of the approximating branching process: fixed point and,
/// when `trees > 0`, direct simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branching {
    pub beta: f64,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub rate: MeanfieldModel,
    #[serde(default)]
    pub trees: usize,
}

pub(crate) fn run_branching(p: &Branching, seed: u64) -> Result<RunOutput> {
    let rate = match p.rate {
        MeanfieldModel::Weighted => OffspringRate::Upper,
        MeanfieldModel::Product => OffspringRate::Product,
    };
    let rows: Vec<Vec<String>> = p
        .lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let m = mean_offspring(p.beta, lambda, p.q, rate)?;
            let pi = survival_probability(p.beta, lambda, p.q, rate)?;
            let (sim, se, survived) = if p.trees > 0 {
                let survived = simulate_branching(p.beta, lambda, p.q, rate, p.trees, &mut stream(seed, i as u64, Role::Branching))?;
                let (e, s) = proportion(survived, p.trees);
                (e.to_string(), s.to_string(), survived.to_string())
            } else {
                (String::new(), String::new(), String::new())
            };
            Ok(vec![lambda.to_string(), m.to_string(), pi.to_string(), p.trees.to_string(), survived, sim, se])
        })
        .collect::<Result<_>>()?;
    let mut out = RunOutput::new();
    out.push("branching.csv", csv_table(&["lambda", "mean_offspring", "pi", "trees", "survived", "simulated", "stderr"], rows)?);
    Ok(out)
}
