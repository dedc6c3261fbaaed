//! Sample one percolation configuration on a small lattice box, label its
//! clusters and report the cluster of the origin.

use spacetime_perc::connectivity::{build_clusters, cluster_at, LatticeBox};
use spacetime_perc::rng::{stream, Role};
use spacetime_perc::spacetime::sample_configuration;
use spacetime_perc::IntensityEnvironment;

fn main() -> spacetime_perc::Result<()> {
    let (bx, origin) = LatticeBox::new(2, 4, 4.0).build()?;
    let mut rng = stream(1, 0, Role::Configuration);
    let config = sample_configuration(&bx, &IntensityEnvironment::homogeneous(0.6, 1.0), &mut rng)?;
    let labeling = build_clusters(&config, &bx)?;
    let info = cluster_at(&labeling, &bx, origin)?;
    println!("{} vertices, {} clusters, largest measure {:.3}", bx.vertex_count(), labeling.cluster_count(), labeling.max_measure());
    println!(
        "origin cluster: measure {:.3}, radius {:.3}, spatial extent {}, temporal extent {:.3}",
        info.measure, info.radius, info.spatial_extent, info.temporal_extent
    );
    Ok(())
}
