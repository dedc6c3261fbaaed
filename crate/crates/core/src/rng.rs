//! Splittable, counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream selected by `(seed, stream id)`, where
//! the stream id packs a replica index and a role tag. Two streams with
//! different ids never overlap, so replicas can be scheduled on any worker
//! without changing their draws.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Role tags keep independent uses of one replica on separate streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Role {
    Configuration = 1,
    Environment = 2,
    Chain = 3,
    Coloring = 4,
    Estimator = 5,
    Branching = 6,
    Validation = 7,
}

pub fn stream(seed: u64, replica: u64, role: Role) -> StreamRng {
    let mut rng = StreamRng::seed_from_u64(seed);
    rng.set_stream((replica << 16) | role as u64);
    rng
}

/// Stream for an arbitrary entity (vertex, edge, criterion...) of a replica.
pub fn entity_stream(seed: u64, replica: u64, entity: u64) -> StreamRng {
    let mut rng = StreamRng::seed_from_u64(seed ^ entity.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(replica << 16);
    rng
}
