use std::cmp::Ordering;

use super::SpaceTimeBox;
use crate::error::{Error, Result};

/// A bridge at `time` joining `(from, time)` and `(to, time)`.
///
/// Undirected configurations store `from < to`; in directed (contact-model)
/// configurations the bridge may only be crossed from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bridge {
    pub from: usize,
    pub to: usize,
    pub time: f64,
}

impl Bridge {
    fn key_cmp(&self, other: &Bridge) -> Ordering {
        (self.from, self.to)
            .cmp(&(other.from, other.to))
            .then(self.time.total_cmp(&other.time))
    }
}

/// Finite sets of cuts (per vertex line) and bridges (per edge) in a box.
///
/// Cut lists are strictly increasing and lie in `(0, T)`. Bridges are sorted
/// by `(from, to, time)`, strictly increasing within one edge, and no bridge
/// time equals a cut time on either endpoint line.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    cuts: Vec<Vec<f64>>,
    bridges: Vec<Bridge>,
    directed: bool,
}

impl Configuration {
    pub fn empty(vertices: usize, directed: bool) -> Self {
        Configuration { cuts: vec![Vec::new(); vertices], bridges: Vec::new(), directed }
    }

    /// Sorts the inputs and validates them against the box.
    pub fn new(bx: &SpaceTimeBox, mut cuts: Vec<Vec<f64>>, mut bridges: Vec<Bridge>, directed: bool) -> Result<Self> {
        for line in &mut cuts {
            line.sort_by(f64::total_cmp);
        }
        if !directed {
            for b in &mut bridges {
                if b.from > b.to {
                    std::mem::swap(&mut b.from, &mut b.to);
                }
            }
        }
        bridges.sort_by(Bridge::key_cmp);
        let config = Configuration { cuts, bridges, directed };
        config.validate(bx)?;
        Ok(config)
    }

    /// Builds without checks; callers guarantee the invariants.
    pub(crate) fn from_sorted_parts(cuts: Vec<Vec<f64>>, bridges: Vec<Bridge>, directed: bool) -> Self {
        let config = Configuration { cuts, bridges, directed };
        debug_assert!(config.bridges.windows(2).all(|w| w[0].key_cmp(&w[1]) == Ordering::Less));
        config
    }

    pub fn validate(&self, bx: &SpaceTimeBox) -> Result<()> {
        let corrupt = |m: String| Err(Error::CorruptConfiguration(m));
        let t_max = bx.time_length();
        if self.cuts.len() != bx.vertex_count() {
            return corrupt(format!("{} cut lines for {} vertices", self.cuts.len(), bx.vertex_count()));
        }
        let inside = |t: f64| t > 0.0 && t < t_max;
        for (x, line) in self.cuts.iter().enumerate() {
            if !line.iter().all(|&t| inside(t)) {
                return corrupt(format!("cut on line {x} outside (0, T)"));
            }
            if !line.windows(2).all(|w| w[0] < w[1]) {
                return corrupt(format!("cuts on line {x} not strictly increasing"));
            }
        }
        for w in self.bridges.windows(2) {
            if w[0].key_cmp(&w[1]) != Ordering::Less {
                return corrupt(format!(
                    "bridges on ({},{}) not strictly increasing at t={}",
                    w[1].from, w[1].to, w[1].time
                ));
            }
        }
        let graph = bx.graph();
        for b in &self.bridges {
            if !graph.has_edge(b.from, b.to) {
                return corrupt(format!("bridge ({},{}) is not on an edge", b.from, b.to));
            }
            if !self.directed && b.from > b.to {
                return corrupt("undirected bridge with from > to".into());
            }
            if !inside(b.time) {
                return corrupt(format!("bridge time {} outside (0, T)", b.time));
            }
            if self.cut_at(b.from, b.time) || self.cut_at(b.to, b.time) {
                return corrupt(format!("bridge ({},{}) at t={} coincides with a cut", b.from, b.to, b.time));
            }
        }
        Ok(())
    }

    pub fn cuts(&self) -> &[Vec<f64>] {
        &self.cuts
    }

    pub fn line_cuts(&self, x: usize) -> &[f64] {
        &self.cuts[x]
    }

    pub fn bridges(&self) -> &[Bridge] {
        &self.bridges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn vertex_count(&self) -> usize {
        self.cuts.len()
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.iter().map(Vec::len).sum()
    }

    pub fn bridge_count(&self) -> usize {
        self.bridges.len()
    }

    /// Bridge times on the (ordered, for directed configurations) pair.
    pub fn bridges_between(&self, from: usize, to: usize) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = if self.directed { (from, to) } else { (from.min(to), from.max(to)) };
        let start = self.bridges.partition_point(|br| (br.from, br.to) < (a, b));
        self.bridges[start..]
            .iter()
            .take_while(move |br| br.from == a && br.to == b)
            .map(|br| br.time)
    }

    pub fn cut_at(&self, x: usize, t: f64) -> bool {
        self.cuts[x].binary_search_by(|c| c.total_cmp(&t)).is_ok()
    }

    /// Adds one cut; fails if it breaks an invariant.
    pub fn insert_cut(&mut self, bx: &SpaceTimeBox, x: usize, t: f64) -> Result<()> {
        let mut next = self.clone();
        let line = &mut next.cuts[x];
        let pos = line.partition_point(|&c| c < t);
        line.insert(pos, t);
        next.validate(bx)?;
        *self = next;
        Ok(())
    }

    /// Adds one bridge; fails if it breaks an invariant.
    pub fn insert_bridge(&mut self, bx: &SpaceTimeBox, bridge: Bridge) -> Result<()> {
        let mut next = self.clone();
        let mut b = bridge;
        if !self.directed && b.from > b.to {
            std::mem::swap(&mut b.from, &mut b.to);
        }
        let pos = next.bridges.partition_point(|o| o.key_cmp(&b) == Ordering::Less);
        next.bridges.insert(pos, b);
        next.validate(bx)?;
        *self = next;
        Ok(())
    }

    /// Multiplies every event time by `c`.
    pub(crate) fn scaled(&self, c: f64) -> Self {
        Configuration {
            cuts: self.cuts.iter().map(|l| l.iter().map(|t| t * c).collect()).collect(),
            bridges: self.bridges.iter().map(|b| Bridge { time: b.time * c, ..*b }).collect(),
            directed: self.directed,
        }
    }

    /// The undirected configuration with the same bridge set.
    pub fn undirected(&self) -> Self {
        if !self.directed {
            return self.clone();
        }
        let mut bridges: Vec<Bridge> = self
            .bridges
            .iter()
            .map(|b| Bridge { from: b.from.min(b.to), to: b.from.max(b.to), time: b.time })
            .collect();
        bridges.sort_by(Bridge::key_cmp);
        bridges.dedup_by(|a, b| a.key_cmp(b) == Ordering::Equal);
        Configuration { cuts: self.cuts.clone(), bridges, directed: false }
    }
}
