//! Finite simple connected graphs carrying the time-lines.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Topology {
    Explicit {
        edges: Vec<(usize, usize)>,
        neighbours: Vec<Vec<usize>>,
    },
    /// `K_n`; edges are never materialised.
    Complete,
}

/// Vertex set `0..n` with an undirected edge set.
///
/// Edges are stored with `x < y`. Optional integer coordinates make the
/// cluster radius use the supremum norm; otherwise hop distance is used.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    topology: Topology,
    coords: Option<Vec<Vec<i64>>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, multi-edges and
    /// disconnected vertex sets.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        let mut neighbours = vec![Vec::new(); n];
        let mut seen = HashMap::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(Error::invalid(format!("loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if seen.insert(e, ()).is_some() {
                return Err(Error::invalid(format!("multiple edge ({},{})", e.0, e.1)));
            }
            canon.push(e);
            neighbours[e.0].push(e.1);
            neighbours[e.1].push(e.0);
        }
        let g = Graph {
            n,
            topology: Topology::Explicit { edges: canon, neighbours },
            coords: None,
        };
        if g.hop_distances(0).iter().any(|d| d.is_none()) {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(g)
    }

    pub fn single_vertex() -> Self {
        Graph::new(1, &[]).expect("single vertex")
    }

    /// Path `0 - 1 - ... - (n-1)` with coordinates `0..n`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        let mut g = Graph::new(n, &edges)?;
        g.coords = Some((0..n as i64).map(|i| vec![i]).collect());
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::new(n, &edges)
    }

    /// The hypercube `[-r, r]^d` of `ℤ^d` with nearest-neighbour edges.
    /// Vertex 0 has coordinates `(-r, ..., -r)`; the centre is
    /// [`Graph::lattice_centre`].
    pub fn lattice_box(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("lattice dimension must be positive"));
        }
        let side = 2 * radius + 1;
        let n = side.checked_pow(dim as u32).ok_or_else(|| Error::Capacity("lattice too large".into()))?;
        let mut coords = Vec::with_capacity(n);
        let mut edges = Vec::new();
        for v in 0..n {
            let mut c = Vec::with_capacity(dim);
            let mut rem = v;
            let mut stride = 1;
            for _ in 0..dim {
                let digit = rem % side;
                rem /= side;
                c.push(digit as i64 - radius as i64);
                if digit + 1 < side {
                    edges.push((v, v + stride));
                }
                stride *= side;
            }
            coords.push(c);
        }
        let mut g = Graph::new(n, &edges)?;
        g.coords = Some(coords);
        Ok(g)
    }

    pub fn lattice_centre(dim: usize, radius: usize) -> usize {
        let side = 2 * radius + 1;
        (0..dim).map(|i| radius * side.pow(i as u32)).sum()
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        Ok(Graph { n, topology: Topology::Complete, coords: None })
    }

    pub fn with_coordinates(mut self, coords: Vec<Vec<i64>>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::invalid("one coordinate vector per vertex required"));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        match &self.topology {
            Topology::Explicit { edges, .. } => edges.len(),
            Topology::Complete => self.n * (self.n - 1) / 2,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.topology, Topology::Complete)
    }

    pub fn coordinates(&self) -> Option<&[Vec<i64>]> {
        self.coords.as_deref()
    }

    /// Endpoints `(x, y)` with `x < y` of edge number `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        match &self.topology {
            Topology::Explicit { edges, .. } => edges[e],
            Topology::Complete => complete_pair(self.n, e),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(move |e| self.endpoints(e))
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        if x >= self.n || y >= self.n || x == y {
            return false;
        }
        match &self.topology {
            Topology::Explicit { neighbours, .. } => neighbours[x].contains(&y),
            Topology::Complete => true,
        }
    }

    /// Spatial distance used by the cluster radius: sup-norm of the
    /// coordinate difference when coordinates exist, hop distance otherwise.
    pub fn distances_from(&self, x: usize) -> Vec<usize> {
        if let Some(coords) = &self.coords {
            let cx = &coords[x];
            return coords
                .iter()
                .map(|c| c.iter().zip(cx).map(|(a, b)| (a - b).unsigned_abs() as usize).max().unwrap_or(0))
                .collect();
        }
        self.hop_distances(x).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect()
    }

    fn hop_distances(&self, x: usize) -> Vec<Option<usize>> {
        match &self.topology {
            Topology::Complete => (0..self.n).map(|v| Some(usize::from(v != x))).collect(),
            Topology::Explicit { neighbours, .. } => {
                let mut dist = vec![None; self.n];
                dist[x] = Some(0);
                let mut queue = VecDeque::from([x]);
                while let Some(v) = queue.pop_front() {
                    let d = dist[v].unwrap();
                    for &w in &neighbours[v] {
                        if dist[w].is_none() {
                            dist[w] = Some(d + 1);
                            queue.push_back(w);
                        }
                    }
                }
                dist
            }
        }
    }
}

/// Inverse of the lexicographic pair enumeration of `K_n`.
fn complete_pair(n: usize, e: usize) -> (usize, usize) {
    // row x starts at x*(2n-x-1)/2
    let start = |x: usize| x * (2 * n - x - 1) / 2;
    let nf = n as f64;
    let guess = ((2.0 * nf - 1.0) - ((2.0 * nf - 1.0).powi(2) - 8.0 * e as f64).sqrt()) / 2.0;
    let mut x = (guess.floor().max(0.0) as usize).min(n.saturating_sub(2));
    while x > 0 && start(x) > e {
        x -= 1;
    }
    while x + 1 < n && start(x + 1) <= e {
        x += 1;
    }
    (x, x + 1 + e - start(x))
}
