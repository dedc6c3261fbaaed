//! Exact transverse-field Ising Gibbs state on a three-site path next to its
//! random-cluster estimate, element by element.

use spacetime_perc::quantum::{validate_reduced, McBudget, QuantumParams};
use spacetime_perc::Graph;

fn main() -> spacetime_perc::Result<()> {
    let params = QuantumParams::new(Graph::path(3)?, 1.0, 1.0, 1.0)?;
    let records = validate_reduced(&params, &[0, 2], &McBudget::new(1_000, 50_000, 9), "P3 sites {0,2}")?;
    for r in &records {
        println!("{:<22} exact {:>9.5}  estimate {:>9.5} ± {:.5}  z {:>6.2}", r.object, r.exact, r.estimate, r.stderr, r.z);
    }
    let worst = records.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    println!("max |z| = {worst:.2}");
    Ok(())
}
