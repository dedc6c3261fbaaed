//! Clusters of a configuration under the undirected connection relation and
//! the directed (contact-model) relation, plus Monte Carlo estimators built
//! on them.

mod directed;
pub mod estimators;
mod labeling;
mod union_find;

pub use directed::{directed_reach, DirectedCluster, Piece};
pub use estimators::{
    empirical_two_point_dq, estimate_decay_rates, estimate_extent_decay, estimate_theta, estimate_theta_curve,
    fit_theta_curve, pairs_from_centre,
    d_q, DecayFit, DqBin, EnvironmentModel, LatticeBox, SlopeFit, ThetaEstimate,
};
pub use labeling::{build_clusters, build_segments, cluster_at, ClusterInfo, ClusterLabeling, Segment};
pub use union_find::UnionFind;
