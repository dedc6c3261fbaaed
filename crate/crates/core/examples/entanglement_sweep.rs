//! Ground-state entanglement entropy of blocks in a weakly coupled
//! transverse Ising chain, and how fast the reduced state stabilises as the
//! surrounding margin grows.

use spacetime_perc::experiment::block_entropies;
use spacetime_perc::quantum::{norm_difference, NormMode};

fn main() -> spacetime_perc::Result<()> {
    let coupling = 0.2;
    for (l, m, s) in block_entropies(coupling, 1.0, &[2, 3, 4], &[0, 1, 2])? {
        println!("L = {l}, margin {m}: S = {s:.6} bits");
    }
    for m in 0..3 {
        let d = norm_difference(2, m, 3, coupling, 1.0, NormMode::Ground)?;
        println!("||rho(margin {m}) - rho(margin 3)|| = {d:.3e}");
    }
    Ok(())
}
