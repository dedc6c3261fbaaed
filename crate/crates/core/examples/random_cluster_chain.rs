//! Swendsen-Wang chain for the space-time random-cluster model with q = 2
//! on a cycle, tracking bridge and cluster counts.

use spacetime_perc::rc::{RcChain, RcParams};
use spacetime_perc::rng::{stream, Role};
use spacetime_perc::{Boundary, Graph, SpaceTimeBox};

fn main() -> spacetime_perc::Result<()> {
    let bx = SpaceTimeBox::new(Graph::cycle(6)?, 3.0, Boundary::PeriodicAll)?;
    let mut chain = RcChain::new(bx, RcParams::new(1.5, 1.0, 2), stream(5, 0, Role::Chain))?;
    chain.run(200)?;
    let (mut bridges, mut clusters) = (0.0, 0.0);
    let sweeps = 2_000;
    for _ in 0..sweeps {
        chain.sweep()?;
        bridges += chain.state().config.bridges().len() as f64;
        clusters += chain.labeling().cluster_count() as f64;
    }
    println!("after {} sweeps: mean bridges {:.2}, mean clusters {:.2}", chain.completed_sweeps(), bridges / sweeps as f64, clusters / sweeps as f64);
    Ok(())
}
