use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{Bridge, Configuration, IntensityEnvironment, RateLaw, Rates, SpaceTimeBox};
use crate::error::{ensure, Result};

/// Poisson-distributed count with the given mean.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 12.0 {
        // multiplication method: expected mean + 1 uniforms
        let limit = (-mean).exp();
        let mut k = 0;
        let mut p: f64 = rng.random();
        while p > limit {
            k += 1;
            p *= rng.random::<f64>();
        }
        return k;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

/// Uniform point of the open interval `(0, length)`.
pub(crate) fn uniform_open<R: Rng + ?Sized>(length: f64, rng: &mut R) -> f64 {
    loop {
        let t = rng.random::<f64>() * length;
        if t > 0.0 && t < length {
            return t;
        }
    }
}

/// Fills `out` with a sorted Poisson sample on `(0, length)`, resampling on
/// exact ties.
pub(crate) fn fill_poisson_times<R: Rng + ?Sized>(rate: f64, length: f64, rng: &mut R, out: &mut Vec<f64>) {
    loop {
        out.clear();
        let n = poisson_count(rate * length, rng);
        out.extend((0..n).map(|_| uniform_open(length, rng)));
        out.sort_unstable_by(f64::total_cmp);
        if out.windows(2).all(|w| w[0] < w[1]) {
            return;
        }
    }
}

/// Exact sample of a homogeneous Poisson process of the given rate on
/// `(0, length)`, returned sorted.
pub fn sample_poisson_times<R: Rng + ?Sized>(rate: f64, length: f64, rng: &mut R) -> Result<Vec<f64>> {
    ensure!(rate.is_finite() && rate >= 0.0, "rate must be finite and nonnegative, got {rate}");
    ensure!(length.is_finite() && length > 0.0, "length must be positive, got {length}");
    let mut out = Vec::new();
    fill_poisson_times(rate, length, rng, &mut out);
    Ok(out)
}

pub(crate) fn sample_cut_lines<R: Rng + ?Sized>(bx: &SpaceTimeBox, env: &IntensityEnvironment, rng: &mut R) -> Vec<Vec<f64>> {
    let t = bx.time_length();
    (0..bx.vertex_count())
        .map(|x| {
            let mut line = Vec::new();
            fill_poisson_times(env.cut_rate(x), t, rng, &mut line);
            line
        })
        .collect()
}

fn collides(cuts: &[Vec<f64>], b: &Bridge) -> bool {
    let hit = |x: usize| cuts[x].binary_search_by(|c| c.total_cmp(&b.time)).is_ok();
    hit(b.from) || hit(b.to)
}

/// Bridge proposals (with one uniform mark each), sorted by key. Complete
/// graphs with a uniform rate draw the total count and scatter it, which
/// is the same law as independent per-edge processes.
pub(crate) fn sample_bridge_proposals<R: Rng + ?Sized>(
    bx: &SpaceTimeBox,
    env: &IntensityEnvironment,
    directed: bool,
    cuts: &[Vec<f64>],
    with_marks: bool,
    rng: &mut R,
) -> Vec<(Bridge, f64)> {
    let t = bx.time_length();
    let graph = bx.graph();
    let orientations = if directed { 2 } else { 1 };
    let mut out: Vec<(Bridge, f64)> = Vec::new();
    if graph.is_complete() {
        let n = graph.vertex_count();
        let rate = env.bridge.get(0);
        loop {
            out.clear();
            if n >= 2 {
                let mean = rate * t * (graph.edge_count() * orientations) as f64;
                let count = poisson_count(mean, rng);
                for _ in 0..count {
                    let a = rng.random_range(0..n);
                    let mut b = rng.random_range(0..n - 1);
                    if b >= a {
                        b += 1;
                    }
                    let (from, to) = if directed { (a, b) } else { (a.min(b), a.max(b)) };
                    let time = uniform_open(t, rng);
                    let mark = if with_marks { rng.random() } else { 0.0 };
                    out.push((Bridge { from, to, time }, mark));
                }
            }
            out.sort_unstable_by(|p, q| (p.0.from, p.0.to).cmp(&(q.0.from, q.0.to)).then(p.0.time.total_cmp(&q.0.time)));
            let ties = out.windows(2).any(|w| (w[0].0.from, w[0].0.to, w[0].0.time) == (w[1].0.from, w[1].0.to, w[1].0.time));
            if !ties && !out.iter().any(|(b, _)| collides(cuts, b)) {
                return out;
            }
        }
    }
    let mut times = Vec::new();
    let mut pieces: Vec<Vec<(Bridge, f64)>> = Vec::new();
    for (e, (x, y)) in graph.edges().enumerate() {
        let rate = env.bridge_rate(e);
        let pairs: &[(usize, usize)] = if directed { &[(x, y), (y, x)] } else { &[(x, y)] };
        for &(from, to) in pairs {
            let edge_bridges = loop {
                fill_poisson_times(rate, t, rng, &mut times);
                let bridges: Vec<(Bridge, f64)> = times
                    .iter()
                    .map(|&time| (Bridge { from, to, time }, if with_marks { rng.random() } else { 0.0 }))
                    .collect();
                if !bridges.iter().any(|(b, _)| collides(cuts, b)) {
                    break bridges;
                }
            };
            pieces.push(edge_bridges);
        }
    }
    out = pieces.into_iter().flatten().collect();
    {
        out.sort_by(|p, q| (p.0.from, p.0.to).cmp(&(q.0.from, q.0.to)).then(p.0.time.total_cmp(&q.0.time)));
    }
    out
}

/// Independent Poisson cuts (rate `δ_x` per line) and bridges (rate `λ_e`
/// per edge) on the box.
pub fn sample_configuration<R: Rng + ?Sized>(bx: &SpaceTimeBox, env: &IntensityEnvironment, rng: &mut R) -> Result<Configuration> {
    env.validate(bx)?;
    let cuts = sample_cut_lines(bx, env, rng);
    let bridges = sample_bridge_proposals(bx, env, false, &cuts, false, rng).into_iter().map(|(b, _)| b).collect();
    Ok(Configuration::from_sorted_parts(cuts, bridges, false))
}

/// Contact-model sampling: two independent bridge processes per edge, one
/// for each orientation.
pub fn sample_directed_configuration<R: Rng + ?Sized>(
    bx: &SpaceTimeBox,
    env: &IntensityEnvironment,
    rng: &mut R,
) -> Result<Configuration> {
    env.validate(bx)?;
    let cuts = sample_cut_lines(bx, env, rng);
    let bridges = sample_bridge_proposals(bx, env, true, &cuts, false, rng).into_iter().map(|(b, _)| b).collect();
    Ok(Configuration::from_sorted_parts(cuts, bridges, true))
}

/// Configuration sampled at the maximal environment with a uniform mark per
/// bridge; thinning by marks couples all bridge scales monotonically.
#[derive(Debug, Clone)]
pub struct MarkedConfiguration {
    config: Configuration,
    marks: Vec<f64>,
}

impl MarkedConfiguration {
    pub fn full(&self) -> &Configuration {
        &self.config
    }

    /// Keeps the bridges whose mark is below `fraction`: the configuration
    /// with every bridge rate multiplied by `fraction`.
    pub fn thinned(&self, fraction: f64) -> Configuration {
        let bridges = self
            .config
            .bridges()
            .iter()
            .zip(&self.marks)
            .filter(|(_, &m)| m < fraction)
            .map(|(b, _)| *b)
            .collect();
        Configuration::from_sorted_parts(self.config.cuts().to_vec(), bridges, self.config.is_directed())
    }
}

pub fn sample_marked_configuration<R: Rng + ?Sized>(
    bx: &SpaceTimeBox,
    env_max: &IntensityEnvironment,
    directed: bool,
    rng: &mut R,
) -> Result<MarkedConfiguration> {
    env_max.validate(bx)?;
    let cuts = sample_cut_lines(bx, env_max, rng);
    let (bridges, marks) = sample_bridge_proposals(bx, env_max, directed, &cuts, true, rng).into_iter().unzip();
    Ok(MarkedConfiguration { config: Configuration::from_sorted_parts(cuts, bridges, directed), marks })
}

fn draw_rate<R: Rng + ?Sized>(law: &RateLaw, rng: &mut R) -> f64 {
    match *law {
        RateLaw::PointMass { value } => value,
        RateLaw::LogNormal { location, scale } => {
            let z: f64 = rng.sample(StandardNormal);
            (location + scale * z).exp()
        }
        RateLaw::TwoPoint { low, high, p_high } => {
            if rng.random::<f64>() < p_high {
                high
            } else {
                low
            }
        }
    }
}

/// I.i.d. cut rates from `cut_law` and bridge rates from `bridge_law`.
pub fn sample_environment<R: Rng + ?Sized>(
    cut_law: &RateLaw,
    bridge_law: &RateLaw,
    bx: &SpaceTimeBox,
    rng: &mut R,
) -> Result<IntensityEnvironment> {
    cut_law.validate()?;
    bridge_law.validate()?;
    let cut = match cut_law.point_mass() {
        Some(v) => Rates::Uniform(v),
        None => Rates::PerEntity((0..bx.vertex_count()).map(|_| draw_rate(cut_law, rng)).collect()),
    };
    let bridge = match bridge_law.point_mass() {
        Some(v) => Rates::Uniform(v),
        None => {
            ensure!(!bx.graph().is_complete(), "random bridge environments need an explicit graph");
            Rates::PerEntity((0..bx.graph().edge_count()).map(|_| draw_rate(bridge_law, rng)).collect())
        }
    };
    let env = IntensityEnvironment { cut, bridge };
    env.validate(bx)?;
    Ok(env)
}

/// Multiplies every event time and the box height by `factor`.
pub fn rescale_time(config: &Configuration, bx: &SpaceTimeBox, factor: f64) -> Result<(Configuration, SpaceTimeBox)> {
    ensure!(factor.is_finite() && factor > 0.0, "time scale factor must be positive, got {factor}");
    let new_box = SpaceTimeBox::new(bx.graph().clone(), bx.time_length() * factor, bx.boundary().clone())?;
    Ok((config.scaled(factor), new_box))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rng::{stream, Role};
    use crate::spacetime::Boundary;

    fn three_sigma(mean: f64, var: f64, n: usize, observed: f64) -> bool {
        (observed - mean).abs() <= 3.0 * (var / n as f64).sqrt()
    }

    #[test]
    fn zero_rate_is_empty() {
        let mut rng = stream(1, 0, Role::Configuration);
        assert!(sample_poisson_times(0.0, 5.0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = stream(1, 0, Role::Configuration);
        assert!(sample_poisson_times(-1.0, 1.0, &mut rng).is_err());
        assert!(sample_poisson_times(1.0, 0.0, &mut rng).is_err());
        assert!(sample_poisson_times(f64::NAN, 1.0, &mut rng).is_err());
    }

    #[test]
    fn poisson_count_moments() {
        // Poisson(6): mean 6, variance 6; the sample variance has variance ~ 2*36/n + 6/n
        let mut rng = stream(2, 0, Role::Configuration);
        let n = 100_000;
        let counts: Vec<f64> = (0..n).map(|_| sample_poisson_times(2.0, 3.0, &mut rng).unwrap().len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(three_sigma(6.0, 6.0, n, mean), "mean {mean}");
        // fourth central moment of Poisson(m) is m + 3m^2
        let var_of_var = (6.0 + 3.0 * 36.0) - 36.0;
        assert!(three_sigma(6.0, var_of_var, n, var), "var {var}");
    }

    #[test]
    fn empty_probability_matches_pmf() {
        let mut rng = stream(3, 0, Role::Configuration);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sample_poisson_times(1.0, 1.0, &mut rng).unwrap().is_empty()).count();
        let p = (-1.0f64).exp();
        assert!(three_sigma(p, p * (1.0 - p), n, zeros as f64 / n as f64));
    }

    #[test]
    fn large_mean_counts_use_the_library_sampler() {
        let mut rng = stream(4, 0, Role::Configuration);
        let n = 20_000;
        let mean = (0..n).map(|_| poisson_count(50.0, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!(three_sigma(50.0, 50.0, n, mean), "{mean}");
    }

    #[test]
    fn zero_environment_gives_empty_configuration() {
        let bx = SpaceTimeBox::new(Graph::path(4).unwrap(), 3.0, Boundary::Free).unwrap();
        let mut rng = stream(5, 0, Role::Configuration);
        let c = sample_configuration(&bx, &IntensityEnvironment::homogeneous(0.0, 0.0), &mut rng).unwrap();
        assert_eq!(c.cut_count() + c.bridge_count(), 0);
        c.validate(&bx).unwrap();
    }

    #[test]
    fn mean_cut_and_bridge_counts() {
        let n = 100_000;
        let single = SpaceTimeBox::new(Graph::single_vertex(), 1.0, Boundary::Free).unwrap();
        let mut rng = stream(6, 0, Role::Configuration);
        let env = IntensityEnvironment::homogeneous(0.0, 1.0);
        let cuts: usize = (0..n).map(|_| sample_configuration(&single, &env, &mut rng).unwrap().cut_count()).sum();
        assert!(three_sigma(1.0, 1.0, n, cuts as f64 / n as f64));

        let pair = SpaceTimeBox::new(Graph::path(2).unwrap(), 2.0, Boundary::Free).unwrap();
        let env = IntensityEnvironment::homogeneous(3.0, 0.0);
        let bridges: usize = (0..n).map(|_| sample_configuration(&pair, &env, &mut rng).unwrap().bridge_count()).sum();
        assert!(three_sigma(6.0, 6.0, n, bridges as f64 / n as f64));
    }

    #[test]
    fn point_mass_environment_is_homogeneous() {
        let bx = SpaceTimeBox::new(Graph::path(5).unwrap(), 1.0, Boundary::Free).unwrap();
        let mut rng = stream(7, 0, Role::Environment);
        let env = sample_environment(&RateLaw::PointMass { value: 1.0 }, &RateLaw::PointMass { value: 0.5 }, &bx, &mut rng).unwrap();
        assert_eq!(env, IntensityEnvironment::homogeneous(0.5, 1.0));
    }

    #[test]
    fn two_point_and_lognormal_environments() {
        let bx = SpaceTimeBox::new(Graph::path(10_001).unwrap(), 1.0, Boundary::Free).unwrap();
        let mut rng = stream(8, 0, Role::Environment);
        let env = sample_environment(
            &RateLaw::LogNormal { location: 0.0, scale: 1.0 },
            &RateLaw::TwoPoint { low: 0.1, high: 1.0, p_high: 0.5 },
            &bx,
            &mut rng,
        )
        .unwrap();
        let Rates::PerEntity(bridges) = &env.bridge else { panic!("expected per-edge rates") };
        let frac = bridges.iter().filter(|&&r| r == 1.0).count() as f64 / bridges.len() as f64;
        assert!(three_sigma(0.5, 0.25, bridges.len(), frac), "{frac}");
        let Rates::PerEntity(cuts) = &env.cut else { panic!("expected per-vertex rates") };
        let mean_log = cuts.iter().map(|r| r.ln()).sum::<f64>() / cuts.len() as f64;
        assert!(three_sigma(0.0, 1.0, cuts.len(), mean_log), "{mean_log}");
    }

    #[test]
    fn rescale_identity_and_linear_map() {
        let bx = SpaceTimeBox::new(Graph::single_vertex(), 2.0, Boundary::Free).unwrap();
        let c = Configuration::new(&bx, vec![vec![0.5, 1.0]], vec![], false).unwrap();
        let (same, same_box) = rescale_time(&c, &bx, 1.0).unwrap();
        assert_eq!(same, c);
        assert_eq!(same_box, bx);
        let (scaled, big) = rescale_time(&c, &bx, 2.0).unwrap();
        assert_eq!(scaled.line_cuts(0), &[1.0, 2.0]);
        assert_eq!(big.time_length(), 4.0);
        scaled.validate(&big).unwrap();
        assert!(rescale_time(&c, &bx, 0.0).is_err());
        assert!(rescale_time(&c, &bx, -1.0).is_err());
    }

    #[test]
    fn seeds_are_deterministic() {
        let bx = SpaceTimeBox::new(Graph::lattice_box(2, 2).unwrap(), 3.0, Boundary::PeriodicAll).unwrap();
        let env = IntensityEnvironment::homogeneous(0.7, 1.3);
        let a = sample_configuration(&bx, &env, &mut stream(9, 4, Role::Configuration)).unwrap();
        let b = sample_configuration(&bx, &env, &mut stream(9, 4, Role::Configuration)).unwrap();
        assert_eq!(a, b);
        a.validate(&bx).unwrap();
    }

    #[test]
    fn directed_configurations_carry_both_orientations() {
        let bx = SpaceTimeBox::new(Graph::path(2).unwrap(), 50.0, Boundary::Free).unwrap();
        let env = IntensityEnvironment::homogeneous(1.0, 0.0);
        let c = sample_directed_configuration(&bx, &env, &mut stream(10, 0, Role::Configuration)).unwrap();
        c.validate(&bx).unwrap();
        assert!(c.bridges_between(0, 1).count() > 0);
        assert!(c.bridges_between(1, 0).count() > 0);
    }

    #[test]
    fn complete_graph_sampling_is_valid() {
        let bx = SpaceTimeBox::new(Graph::complete(40).unwrap(), 1.0, Boundary::PeriodicAll).unwrap();
        let env = IntensityEnvironment::homogeneous(2.0 / 40.0, 1.0);
        let c = sample_configuration(&bx, &env, &mut stream(11, 0, Role::Configuration)).unwrap();
        c.validate(&bx).unwrap();
    }
}
