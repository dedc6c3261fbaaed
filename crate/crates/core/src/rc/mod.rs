//! Continuum random-cluster measure for integer `q`, sampled by a
//! Swendsen–Wang alternation between configurations and Potts spin fields.

mod chain;
pub mod checkpoint;
mod spin;

pub use chain::{initial_state, sample_rc, sw_sweep, RcChain, RcParams, RcState};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use spin::{color_clusters, field_from_colors, spin_log_density, SpinField};
