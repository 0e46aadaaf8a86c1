//! Seeded random streams.
//!
//! Every generator is a ChaCha8 stream keyed by the 64-bit user seed. Work item
//! `i` of a stochastic task uses stream `i`, so replications are independent and
//! reproducible regardless of execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream offsets separating the purposes that draw randomness within one replication.
pub const PURPOSE_DATA: u64 = 0;
pub const PURPOSE_CLAD_STARTS: u64 = 1;
const PURPOSES: u64 = 4;

pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream for `purpose` inside replication `rep`.
pub fn replication_stream(seed: u64, rep: u64, purpose: u64) -> StreamRng {
    debug_assert!(purpose < PURPOSES);
    substream(seed, rep * PURPOSES + purpose)
}
