//! Seeded random-number streams.
//!
//! Every stochastic operation takes a `u64` seed and derives independent
//! ChaCha streams from it by index. Parallel work assigns one stream per
//! work item, so aggregates are identical whatever the thread schedule and
//! whether the `parallel` feature is enabled.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Master seed from which per-item streams are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed(pub u64);

impl StreamSeed {
    /// RNG for stream `index`. Streams with distinct indices never overlap.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}
