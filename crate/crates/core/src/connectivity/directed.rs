use crate::error::{ensure, Result};
use crate::spacetime::{Configuration, Point, SpaceTimeBox};

use super::labeling::{LineIndex, Segment};

/// A reachable piece `[start, end)` of one line; on identified lines `end`
/// may exceed `T` (the piece continues through `0 ≡ T`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub vertex: usize,
    pub start: f64,
    pub end: f64,
}

impl Piece {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Points reachable from `origin` along time-increasing paths.
#[derive(Debug, Clone)]
pub struct DirectedCluster {
    pub origin: Point,
    pub pieces: Vec<Piece>,
    /// Segment id (in [`super::build_segments`] order) of each piece.
    pub segment_ids: Vec<usize>,
}

impl DirectedCluster {
    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    /// `sup dist + |t - s|` over the pieces, times read in `[0, T]`.
    pub fn radius(&self, bx: &SpaceTimeBox) -> f64 {
        let dist = bx.graph().distances_from(self.origin.vertex);
        let t_max = bx.time_length();
        self.pieces
            .iter()
            .map(|p| {
                let seg = Segment { vertex: p.vertex, start: p.start, end: p.end, wraps: p.end > t_max };
                dist[p.vertex] as f64 + seg.max_time_offset(self.origin.time, t_max)
            })
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, p: Point, t_max: f64) -> bool {
        self.pieces.iter().any(|piece| {
            piece.vertex == p.vertex
                && if piece.end > t_max {
                    p.time >= piece.start || p.time < piece.end - t_max
                } else {
                    p.time >= piece.start && p.time < piece.end
                }
        })
    }
}

/// Directed cluster of `origin`.
///
/// Each segment records the earliest (forward) offset at which it is
/// entered; a segment entered at offset `o` is reachable on `[start + o,
/// end)` and fires every outgoing directed bridge at or after `o`. Offsets
/// only decrease and take finitely many values, so the worklist reaches a
/// fixed point, including on identified lines where paths wrap in time.
/// Undirected configurations are read with both orientations of every
/// bridge.
pub fn directed_reach(config: &Configuration, bx: &SpaceTimeBox, origin: Point) -> Result<DirectedCluster> {
    origin.check_in(bx)?;
    ensure!(config.vertex_count() == bx.vertex_count(), "configuration does not match the box");
    let index = LineIndex::new(config, bx);
    let t_max = bx.time_length();
    let n = bx.vertex_count();

    let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for b in config.bridges() {
        outgoing[b.from].push((b.time, b.to));
        if !config.is_directed() {
            outgoing[b.to].push((b.time, b.from));
        }
    }
    for out in &mut outgoing {
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let mut entry: Vec<Option<f64>> = vec![None; index.segment_count()];
    let mut work: Vec<(usize, f64)> = Vec::new();
    let enter = |seg_id: usize, t: f64, index: &LineIndex| -> (usize, f64) {
        let seg = index.segment(seg_id);
        // a cut-free circle is wholly reachable once entered
        let off = if seg.wraps && index.cuts[seg.vertex].is_empty() { 0.0 } else { index.offset_in(&seg, t) };
        (seg_id, off)
    };
    work.push(enter(index.segment_at(origin.vertex, origin.time), origin.time, &index));

    while let Some((sid, off)) = work.pop() {
        let previous = entry[sid];
        if previous.is_some_and(|p| p <= off) {
            continue;
        }
        entry[sid] = Some(off);
        let seg = index.segment(sid);
        let upper = previous.unwrap_or(f64::INFINITY);
        // bridges leaving the newly reached part [off, upper) of the segment
        let out = &outgoing[seg.vertex];
        let fire = |lo: f64, hi: f64, work: &mut Vec<(usize, f64)>| {
            let first = out.partition_point(|&(t, _)| t < lo);
            for &(t, to) in out[first..].iter().take_while(|&&(t, _)| t < hi) {
                let o = index.offset_in(&seg, t);
                if o >= off && o < upper {
                    work.push(enter(index.segment_at(to, t), t, &index));
                }
            }
        };
        if seg.wraps {
            fire(seg.start, t_max + 1.0, &mut work);
            fire(0.0, seg.end - t_max, &mut work);
        } else {
            fire(seg.start, seg.end, &mut work);
        }
    }

    let mut pieces = Vec::new();
    let mut segment_ids = Vec::new();
    for (sid, e) in entry.iter().enumerate() {
        if let Some(off) = e {
            let seg = index.segment(sid);
            pieces.push(Piece { vertex: seg.vertex, start: seg.start + off, end: seg.end });
            segment_ids.push(sid);
        }
    }
    Ok(DirectedCluster { origin, pieces, segment_ids })
}
