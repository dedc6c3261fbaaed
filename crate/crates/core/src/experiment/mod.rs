//! Reproducible experiment configs, artifact writing and the validation
//! suite behind the `stperc` binary.

mod config;
mod kinds;
mod output;
pub mod validation;

pub use config::{parse_boundary, Experiment, ExperimentConfig, GraphSpec, KINDS};
pub use kinds::{
    block_entropies, giant_fractions, Branching, EntanglementSweep, MeanfieldGiant, MeanfieldModel, QuantumValidate,
    RadiusCurves, RcChainRun,
};
pub use output::{csv_table, write_outputs, OutputFile, RunOutput};

use crate::error::Result;

/// Runs one experiment. Replicas are spread over the current rayon pool;
/// the artifacts do not depend on the number of workers.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let seed = config.seed;
    match &config.experiment {
        Experiment::PercolationDecay(p) => kinds::run_radius_curves(p, false, seed),
        Experiment::Contact(p) => kinds::run_radius_curves(p, true, seed),
        Experiment::RcChain(p) => kinds::run_rc_chain(p, seed),
        Experiment::QuantumValidate(p) => kinds::run_quantum_validate(p, seed),
        Experiment::EntanglementSweep(p) => kinds::run_entanglement_sweep(p),
        Experiment::MeanfieldGiant(p) => kinds::run_meanfield_giant(p, seed),
        Experiment::Branching(p) => kinds::run_branching(p, seed),
    }
}

/// Exit status convention of the binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION_FAILED: i32 = 2;
