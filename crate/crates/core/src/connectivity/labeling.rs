use crate::error::{Error, Result};
use crate::spacetime::{Configuration, Point, SpaceTimeBox};

use super::UnionFind;

/// Maximal cut-free interval `[start, end)` of one line.
///
/// On an identified line the segment through `0 ≡ T` has `wraps == true`
/// and `end > T` (it covers `[start, T) ∪ [0, end - T)`); a cut-free
/// identified line is the single circular segment `[0, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub vertex: usize,
    pub start: f64,
    pub end: f64,
    pub wraps: bool,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Sup of `|t - s|` over the points of the segment, times read in `[0, T]`.
    pub(crate) fn max_time_offset(&self, s: f64, t_max: f64) -> f64 {
        if self.wraps {
            let tail_end = self.end - t_max;
            [self.start, t_max, 0.0, tail_end].iter().map(|&u| (u - s).abs()).fold(0.0, f64::max)
        } else {
            (self.start - s).abs().max((self.end - s).abs())
        }
    }

    /// Whether time `t ∈ [0, T]` lies in the segment (right-continuous).
    pub fn contains_time(&self, t: f64, t_max: f64) -> bool {
        if self.wraps {
            t >= self.start || t < self.end - t_max
        } else {
            t >= self.start && t < self.end
        }
    }
}

/// Lookup structure for the segments of every line of a configuration.
#[derive(Debug, Clone)]
pub(crate) struct LineIndex {
    pub(crate) offsets: Vec<usize>,
    pub(crate) cuts: Vec<Vec<f64>>,
    pub(crate) periodic: Vec<bool>,
    pub(crate) time_length: f64,
}

impl LineIndex {
    pub(crate) fn new(config: &Configuration, bx: &SpaceTimeBox) -> Self {
        let n = bx.vertex_count();
        let periodic: Vec<bool> = (0..n).map(|x| bx.is_periodic(x)).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for x in 0..n {
            offsets.push(total);
            let d = config.line_cuts(x).len();
            total += if periodic[x] { d.max(1) } else { d + 1 };
        }
        offsets.push(total);
        LineIndex { offsets, cuts: config.cuts().to_vec(), periodic, time_length: bx.time_length() }
    }

    pub(crate) fn segment_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global id of the segment containing `(x, t)`; at a cut the segment
    /// starting there is returned.
    pub(crate) fn segment_at(&self, x: usize, t: f64) -> usize {
        let cuts = &self.cuts[x];
        let pos = cuts.partition_point(|&c| c <= t);
        let local = if self.periodic[x] && (pos == cuts.len() || cuts.is_empty()) { 0 } else { pos };
        self.offsets[x] + local
    }

    pub(crate) fn is_cut(&self, x: usize, t: f64) -> bool {
        self.cuts[x].binary_search_by(|c| c.total_cmp(&t)).is_ok()
    }

    pub(crate) fn segment(&self, id: usize) -> Segment {
        let x = self.offsets.partition_point(|&o| o <= id) - 1;
        self.local_segment(x, id - self.offsets[x])
    }

    pub(crate) fn local_segment(&self, x: usize, local: usize) -> Segment {
        let cuts = &self.cuts[x];
        let t_max = self.time_length;
        if self.periodic[x] {
            match cuts.len() {
                0 => Segment { vertex: x, start: 0.0, end: t_max, wraps: true },
                d if local == 0 => Segment { vertex: x, start: cuts[d - 1], end: cuts[0] + t_max, wraps: true },
                _ => Segment { vertex: x, start: cuts[local - 1], end: cuts[local], wraps: false },
            }
        } else {
            let start = if local == 0 { 0.0 } else { cuts[local - 1] };
            let end = if local == cuts.len() { t_max } else { cuts[local] };
            Segment { vertex: x, start, end, wraps: false }
        }
    }

    /// Offset of time `t` from the start of the segment containing it,
    /// measured forward in time (around the circle for wrapping segments).
    pub(crate) fn offset_in(&self, seg: &Segment, t: f64) -> f64 {
        if seg.wraps && t < seg.start {
            t + self.time_length - seg.start
        } else {
            t - seg.start
        }
    }

    pub(crate) fn segments(&self) -> Vec<Segment> {
        (0..self.cuts.len())
            .flat_map(|x| (0..self.offsets[x + 1] - self.offsets[x]).map(move |l| (x, l)))
            .map(|(x, l)| self.local_segment(x, l))
            .collect()
    }
}

/// Maximal cut-free intervals of every line, in line order and time order
/// (the wrapping segment first on identified lines).
pub fn build_segments(config: &Configuration, bx: &SpaceTimeBox) -> Vec<Segment> {
    LineIndex::new(config, bx).segments()
}

/// Partition of the segments into clusters.
#[derive(Debug, Clone)]
pub struct ClusterLabeling {
    index: LineIndex,
    segments: Vec<Segment>,
    cluster_of: Vec<usize>,
    measures: Vec<f64>,
}

impl ClusterLabeling {
    pub fn cluster_count(&self) -> usize {
        self.measures.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Cluster id of every segment; ids are `0..k` in order of first
    /// appearance.
    pub fn cluster_ids(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Lebesgue measure of each cluster.
    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn max_measure(&self) -> f64 {
        self.measures.iter().copied().fold(0.0, f64::max)
    }

    pub fn segment_at(&self, p: Point) -> usize {
        self.index.segment_at(p.vertex, p.time)
    }

    pub fn cluster_of(&self, p: Point) -> usize {
        self.cluster_of[self.segment_at(p)]
    }

    /// Cluster holding `(x, T)` as a left limit; on an identified line this
    /// is the cluster at time 0.
    pub fn end_cluster(&self, x: usize) -> usize {
        let local = if self.index.periodic[x] { 0 } else { self.index.cuts[x].len() };
        self.cluster_of[self.index.offsets[x] + local]
    }

    pub fn connected(&self, a: Point, b: Point) -> bool {
        self.cluster_of(a) == self.cluster_of(b)
    }

    pub fn time_length(&self) -> f64 {
        self.index.time_length
    }

    pub(crate) fn index(&self) -> &LineIndex {
        &self.index
    }

    /// Segment ids per cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (s, &c) in self.cluster_of.iter().enumerate() {
            out[c].push(s);
        }
        out
    }
}

/// Merges, for every bridge, the segments holding its two endpoints.
/// Bridges of a directed configuration are used without orientation.
pub fn build_clusters(config: &Configuration, bx: &SpaceTimeBox) -> Result<ClusterLabeling> {
    if config.vertex_count() != bx.vertex_count() {
        return Err(Error::CorruptConfiguration("configuration does not match the box".into()));
    }
    let index = LineIndex::new(config, bx);
    let mut uf = UnionFind::new(index.segment_count());
    for b in config.bridges() {
        if index.is_cut(b.from, b.time) || index.is_cut(b.to, b.time) {
            return Err(Error::CorruptConfiguration(format!(
                "bridge ({},{}) at t={} coincides with a cut",
                b.from, b.to, b.time
            )));
        }
        uf.union(index.segment_at(b.from, b.time), index.segment_at(b.to, b.time));
    }
    let (cluster_of, k) = uf.labels();
    let segments = index.segments();
    let mut measures = vec![0.0; k];
    for (s, seg) in segments.iter().enumerate() {
        measures[cluster_of[s]] += seg.length();
    }
    Ok(ClusterLabeling { index, segments, cluster_of, measures })
}

/// Statistics of the cluster containing a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterInfo {
    pub id: usize,
    /// Lebesgue measure `|C|`.
    pub measure: f64,
    /// `sup{ dist(x, p.x) + |t - p.t| : (x, t) ∈ C }`.
    pub radius: f64,
    /// `sup dist(x, p.x)` over the cluster.
    pub spatial_extent: f64,
    /// `sup |t - p.t|` over the cluster.
    pub temporal_extent: f64,
}

/// Id, measure and radius of the cluster at `p`; distances to `p`'s vertex
/// use [`crate::Graph::distances_from`].
pub fn cluster_at(labeling: &ClusterLabeling, bx: &SpaceTimeBox, p: Point) -> Result<ClusterInfo> {
    p.check_in(bx)?;
    let id = labeling.cluster_of(p);
    let dist = bx.graph().distances_from(p.vertex);
    let t_max = bx.time_length();
    let (mut radius, mut spatial, mut temporal) = (0.0f64, 0.0f64, 0.0f64);
    for (s, seg) in labeling.segments.iter().enumerate() {
        if labeling.cluster_of[s] != id {
            continue;
        }
        let d = dist[seg.vertex] as f64;
        let dt = seg.max_time_offset(p.time, t_max);
        radius = radius.max(d + dt);
        spatial = spatial.max(d);
        temporal = temporal.max(dt);
    }
    Ok(ClusterInfo { id, measure: labeling.measures[id], radius, spatial_extent: spatial, temporal_extent: temporal })
}
