//! Transverse-field quantum Ising model: exact computations in the spin
//! product basis and their random-cluster path-integral estimators.

mod basis;
mod estimate;
mod exact;

pub use basis::SpinBasisIndex;
pub use estimate::{
    chain_block, norm_difference, rc_density_element, rc_density_matrix, rc_reduced_element, rc_reduced_matrix,
    validate_reduced, z_score, EstimatedMatrix, McBudget, NormMode, ValidationRecord, BATCHES,
};
pub use exact::{
    build_hamiltonian, entanglement_entropy, gibbs_operator, ground_state, ground_state_density, matrix_csv,
    pure_reduced_density, reduced_density, DensityOperator, GroundState, QuantumParams, DENSE_CAP, SPARSE_CAP,
};
