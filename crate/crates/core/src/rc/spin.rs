use rand::Rng;

use crate::connectivity::ClusterLabeling;
use crate::error::{Error, Result};
use crate::spacetime::{Configuration, SpaceTimeBox};

/// Piecewise-constant spin field with values in `1..=q`.
///
/// Line `x` takes value `values[x][i]` on `[jumps[x][i-1], jumps[x][i])`,
/// with the first piece starting at 0 and the last ending at `T`. On an
/// identified line the first and last values agree.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    q: u8,
    jumps: Vec<Vec<f64>>,
    values: Vec<Vec<u8>>,
}

impl SpinField {
    pub fn constant(vertices: usize, q: u8, spin: u8) -> Self {
        SpinField { q, jumps: vec![Vec::new(); vertices], values: vec![vec![spin]; vertices] }
    }

    /// Builds a field from explicit pieces, dropping jumps between equal
    /// values.
    pub fn from_pieces(bx: &SpaceTimeBox, q: u8, jumps: Vec<Vec<f64>>, values: Vec<Vec<u8>>) -> Result<Self> {
        let n = bx.vertex_count();
        if jumps.len() != n || values.len() != n {
            return Err(Error::invalid("spin field must have one entry per line"));
        }
        let mut field = SpinField { q, jumps: Vec::with_capacity(n), values: Vec::with_capacity(n) };
        for (x, (j, v)) in jumps.into_iter().zip(values).enumerate() {
            if v.len() != j.len() + 1 {
                return Err(Error::invalid(format!("line {x}: {} pieces for {} jumps", v.len(), j.len())));
            }
            if v.iter().any(|&s| s == 0 || s > q) {
                return Err(Error::invalid(format!("line {x}: spin outside 1..={q}")));
            }
            if j.windows(2).any(|w| w[0] >= w[1]) || j.iter().any(|&t| !(t > 0.0 && t < bx.time_length())) {
                return Err(Error::invalid(format!("line {x}: jump times must increase inside (0, T)")));
            }
            if bx.is_periodic(x) && v[0] != v[v.len() - 1] {
                return Err(Error::invalid(format!("line {x}: spins disagree across the identified endpoints")));
            }
            let (j, v) = compress(&j, &v);
            field.jumps.push(j);
            field.values.push(v);
        }
        Ok(field)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    pub fn jumps(&self, x: usize) -> &[f64] {
        &self.jumps[x]
    }

    pub fn values(&self, x: usize) -> &[u8] {
        &self.values[x]
    }

    /// Spin at `(x, t)`, right-continuous at jumps.
    pub fn at(&self, x: usize, t: f64) -> u8 {
        self.values[x][self.jumps[x].partition_point(|&j| j <= t)]
    }

    /// Spin at `(x, T)` as a left limit.
    pub fn at_end(&self, x: usize) -> u8 {
        *self.values[x].last().unwrap()
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }

    /// `(start, end, spin)` pieces of one line.
    pub fn pieces(&self, x: usize, time_length: f64) -> Vec<(f64, f64, u8)> {
        let j = &self.jumps[x];
        self.values[x]
            .iter()
            .enumerate()
            .map(|(i, &s)| (if i == 0 { 0.0 } else { j[i - 1] }, if i == j.len() { time_length } else { j[i] }, s))
            .collect()
    }

    /// Applies a permutation of the colours (`perm[s - 1]` is the new spin).
    pub fn permuted(&self, perm: &[u8]) -> Self {
        SpinField {
            q: self.q,
            jumps: self.jumps.clone(),
            values: self.values.iter().map(|v| v.iter().map(|&s| perm[s as usize - 1]).collect()).collect(),
        }
    }

    /// Checks that the field is constant on the clusters of `config`: jumps
    /// only at cuts, identified endpoints agree, and bridges join equal spins.
    pub fn check_consistent(&self, config: &Configuration, bx: &SpaceTimeBox) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentState(m));
        if self.vertex_count() != bx.vertex_count() {
            return bad("spin field and box have different vertex counts".into());
        }
        for x in 0..self.vertex_count() {
            for &t in &self.jumps[x] {
                if !config.cut_at(x, t) {
                    return bad(format!("spin jump at ({x}, {t}) is not a cut"));
                }
            }
            if bx.is_periodic(x) && self.values[x][0] != self.at_end(x) {
                return bad(format!("line {x}: spins disagree across the identified endpoints"));
            }
        }
        for b in config.bridges() {
            if self.at(b.from, b.time) != self.at(b.to, b.time) {
                return bad(format!("bridge ({}, {}, {}) joins unequal spins", b.from, b.to, b.time));
            }
        }
        Ok(())
    }
}

fn compress(jumps: &[f64], values: &[u8]) -> (Vec<f64>, Vec<u8>) {
    let mut j = Vec::with_capacity(jumps.len());
    let mut v = Vec::with_capacity(values.len());
    v.push(values[0]);
    for (i, &t) in jumps.iter().enumerate() {
        if values[i + 1] != *v.last().unwrap() {
            j.push(t);
            v.push(values[i + 1]);
        }
    }
    (j, v)
}

/// Independent uniform spin per cluster. With `q == 1` no randomness is
/// drawn.
pub fn color_clusters<R: Rng + ?Sized>(labeling: &ClusterLabeling, config: &Configuration, q: u8, rng: &mut R) -> Result<SpinField> {
    if q == 0 {
        return Err(Error::invalid("q must be at least 1"));
    }
    let colors: Vec<u8> =
        if q == 1 { vec![1; labeling.cluster_count()] } else { (0..labeling.cluster_count()).map(|_| rng.random_range(1..=q)).collect() };
    Ok(field_from_colors(labeling, config, q, &colors))
}

/// Spin field assigning `colors[c]` to cluster `c`.
pub fn field_from_colors(labeling: &ClusterLabeling, config: &Configuration, q: u8, colors: &[u8]) -> SpinField {
    let index = labeling.index();
    let ids = labeling.cluster_ids();
    let n = config.vertex_count();
    let mut jumps = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let cuts = config.line_cuts(x);
        let base = index.offsets[x];
        let color = |local: usize| colors[ids[base + local]];
        let raw: Vec<u8> = if index.periodic[x] {
            // the wrapping segment 0 covers both ends of the line
            (0..cuts.len().max(1)).map(color).chain((!cuts.is_empty()).then(|| color(0))).collect()
        } else {
            (0..=cuts.len()).map(color).collect()
        };
        let (j, v) = compress(cuts, &raw);
        jumps.push(j);
        values.push(v);
    }
    SpinField { q, jumps, values }
}

/// Sufficient statistics `(L(σ), |D_σ|)`: the total Lebesgue measure of
/// spin agreement over edges and the number of spin jumps.
pub fn spin_log_density(spins: &SpinField, bx: &SpaceTimeBox) -> Result<(f64, usize)> {
    if spins.vertex_count() != bx.vertex_count() {
        return Err(Error::invalid("spin field and box have different vertex counts"));
    }
    let t_max = bx.time_length();
    let agreement = bx.graph().edges().map(|(x, y)| agreement_length(spins, x, y, t_max)).sum();
    Ok((agreement, spins.jump_count()))
}

fn agreement_length(spins: &SpinField, x: usize, y: usize, t_max: f64) -> f64 {
    let (jx, jy) = (spins.jumps(x), spins.jumps(y));
    let (vx, vy) = (spins.values(x), spins.values(y));
    let (mut i, mut k) = (0, 0);
    let mut t = 0.0;
    let mut total = 0.0;
    loop {
        let nx = jx.get(i).copied().unwrap_or(t_max);
        let ny = jy.get(k).copied().unwrap_or(t_max);
        let next = nx.min(ny);
        if vx[i] == vy[k] {
            total += next - t;
        }
        if next >= t_max {
            return total;
        }
        if nx == next {
            i += 1;
        }
        if ny == next {
            k += 1;
        }
        t = next;
    }
}
