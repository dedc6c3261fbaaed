//! Event-driven simulation and verification toolkit for percolation-type
//! models on space–time `G × ℝ`.
//!
//! The crate is organised by model layer:
//!
//! * [`spacetime`]: graphs, boxes `G × [0, T]` with boundary identifications,
//!   intensity environments and exact sampling of cut/bridge Poisson
//!   configurations.
//! * [`connectivity`]: clusters under the undirected relation and the
//!   directed (contact-model) relation, with Monte Carlo estimators.
//! * [`rc`]: the continuum random-cluster measure for integer `q`, sampled
//!   by a Swendsen–Wang alternation, and its Potts colouring.
//! * [`quantum`]: exact transverse-field Ising computations and their
//!   random-cluster path-integral estimators.
//! * [`meanfield`]: analytic formulas and simulation on `K_n × [0, β]`.
//! * [`experiment`]: reproducible experiment configs, outputs and the
//!   validation suite behind the `stperc` binary.

pub mod connectivity;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod meanfield;
pub mod quantum;
pub mod rc;
pub mod rng;
pub mod spacetime;
pub mod stats;

pub use error::{Error, Result};
pub use graph::Graph;
pub use spacetime::{Boundary, Configuration, IntensityEnvironment, Point, SpaceTimeBox};
