//! Space–time geometry, intensity environments and exact sampling of
//! cut/bridge Poisson configurations.

mod configuration;
mod environment;
pub mod format;
pub(crate) mod sampling;

pub use configuration::{Bridge, Configuration};
pub use environment::{IntensityEnvironment, RateLaw, Rates};
pub use sampling::{
    rescale_time, sample_configuration, sample_directed_configuration, sample_environment,
    sample_marked_configuration, sample_poisson_times, MarkedConfiguration,
};

use crate::error::{ensure, Result};
use crate::graph::Graph;

/// How the ends `0` and `T` of each time-line are treated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Boundary {
    Free,
    /// Every line is a circle, `(x, 0) ≡ (x, T)`.
    PeriodicAll,
    /// Only the listed vertices have `(x, 0) ≡ (x, T)`. Stored sorted.
    PeriodicOn(Vec<usize>),
}

impl Boundary {
    pub fn periodic_on(vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Boundary::PeriodicOn(v)
    }
}

/// The box `G × [0, T]` with its boundary identification.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeBox {
    graph: Graph,
    time_length: f64,
    boundary: Boundary,
}

impl SpaceTimeBox {
    pub fn new(graph: Graph, time_length: f64, boundary: Boundary) -> Result<Self> {
        ensure!(time_length.is_finite() && time_length > 0.0, "time length must be positive, got {time_length}");
        if let Boundary::PeriodicOn(set) = &boundary {
            ensure!(
                set.iter().all(|&x| x < graph.vertex_count()),
                "periodic vertex set is not a subset of the vertices"
            );
            ensure!(set.windows(2).all(|w| w[0] < w[1]), "periodic vertex set must be sorted and distinct");
        }
        Ok(SpaceTimeBox { graph, time_length, boundary })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn time_length(&self) -> f64 {
        self.time_length
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Whether line `x` has its endpoints identified.
    pub fn is_periodic(&self, x: usize) -> bool {
        match &self.boundary {
            Boundary::Free => false,
            Boundary::PeriodicAll => true,
            Boundary::PeriodicOn(set) => set.binary_search(&x).is_ok(),
        }
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Result<Self> {
        SpaceTimeBox::new(self.graph.clone(), self.time_length, boundary)
    }

    /// Total Lebesgue measure `|V| · T`.
    pub fn volume(&self) -> f64 {
        self.vertex_count() as f64 * self.time_length
    }
}

/// A point `(x, t)` of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub vertex: usize,
    pub time: f64,
}

impl Point {
    pub fn new(vertex: usize, time: f64) -> Self {
        Point { vertex, time }
    }

    pub fn check_in(&self, bx: &SpaceTimeBox) -> Result<()> {
        ensure!(self.vertex < bx.vertex_count(), "vertex {} not in the box", self.vertex);
        ensure!(
            self.time >= 0.0 && self.time <= bx.time_length(),
            "time {} outside [0, {}]",
            self.time,
            bx.time_length()
        );
        Ok(())
    }
}
