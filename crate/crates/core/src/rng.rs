//! Seeded random streams.
//!
//! Every run takes a single seed. Components draw from their own named
//! sub-stream so that, e.g., changing the subset seed never perturbs the
//! weight initialization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named sub-streams derived from one experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Init,
    Shuffle,
    Subset,
    Task,
    Augment,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Init => 1,
            Stream::Shuffle => 2,
            Stream::Subset => 3,
            Stream::Task => 4,
            Stream::Augment => 5,
        }
    }
}

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, which: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}
