//! Largest cluster on the complete graph K_n against the branching-process
//! prediction, on both sides of the critical bridge rate.

use spacetime_perc::meanfield::{lambda_c, simulate_complete_graph, survival_probability, ChainBudget, OffspringRate};
use spacetime_perc::rng::{stream, Role};

fn main() -> spacetime_perc::Result<()> {
    let beta = 1.0;
    let critical = lambda_c(beta, 1.0)?.value;
    println!("critical rate at beta = {beta}: {critical:.6}");
    for lambda in [0.5, 1.0, 2.0, 3.0] {
        let fractions: Vec<f64> = (0..20)
            .map(|r| simulate_complete_graph(1_500, beta, lambda, 1, ChainBudget::default(), stream(11, r, Role::Chain)).map(|s| s.giant_fraction()))
            .collect::<Result<_, _>>()?;
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        let predicted = beta * survival_probability(beta, lambda, 1.0, OffspringRate::Upper)?;
        println!("lambda {lambda}: M/n {mean:.4}, predicted {predicted:.4}");
    }
    Ok(())
}
