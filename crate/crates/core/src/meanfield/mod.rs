//! The continuum random-cluster model on `K_n × [0, β]` with circular time:
//! closed-form quantities, the approximating branching process and
//! giant-cluster simulation.

mod branching;
mod complete;
mod formulas;

pub use branching::{
    mean_offspring, sample_cut_count, sample_weighted_interval, simulate_branching, survival_fixed_point,
    survival_probability, IntervalLaw, OffspringRate, SURVIVAL_POPULATION,
};
pub use complete::{
    sample_product_rc_model, simulate_complete_graph, ChainBudget, MeanFieldSample, CAP_PERCOLATION, CAP_WEIGHTED,
};
pub use formulas::{cut_count_normaliser, cut_count_pmf, f, fq, lambda_c, CriticalValue};
