//! Survival probability of the interval branching process: fixed point
//! against direct simulation, for the percolation and q = 2 weightings.

use spacetime_perc::meanfield::{mean_offspring, simulate_branching, survival_probability, OffspringRate};
use spacetime_perc::rng::{stream, Role};

fn main() -> spacetime_perc::Result<()> {
    let beta = 1.0;
    let trees = 20_000;
    for (q, rate) in [(1.0, OffspringRate::Upper), (2.0, OffspringRate::Product)] {
        for lambda in [1.0, 2.0, 4.0] {
            let mean = mean_offspring(beta, lambda, q, rate)?;
            let pi = survival_probability(beta, lambda, q, rate)?;
            let mut rng = stream(13, lambda.to_bits(), Role::Branching);
            let sim = simulate_branching(beta, lambda, q, rate, trees, &mut rng)? as f64 / trees as f64;
            println!("q {q}, lambda {lambda}: mean offspring {mean:.3}, pi {pi:.4}, simulated {sim:.4}");
        }
    }
    Ok(())
}
