//! Reproducible random streams.
//!
//! Every stochastic component takes an explicit 64-bit seed and derives
//! independent substreams from it with a counter-based generator, so results
//! are identical regardless of thread count or execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep substreams from colliding when the same master seed
/// fans out into data generation, search restarts, calibration, etc.
#[derive(Debug, Clone, Copy)]
pub enum StreamKind {
    NullData,
    SignalSigns,
    SearchRestart,
    Calibration,
    Placement,
    LawShift,
    AdaptivePair,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::NullData => 0x11,
            StreamKind::SignalSigns => 0x22,
            StreamKind::SearchRestart => 0x33,
            StreamKind::Calibration => 0x44,
            StreamKind::Placement => 0x55,
            StreamKind::LawShift => 0x66,
            StreamKind::AdaptivePair => 0x77,
        }
    }
}

/// SplitMix64 finalizer; a bijective mix so derived seeds never collide for
/// distinct (seed, tag, index) triples by accident of arithmetic.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives a child seed for (master seed, purpose, index).
pub fn derive_seed(seed: u64, kind: StreamKind, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ kind.tag().wrapping_mul(0xA24BAED4963EE407)).wrapping_add(index))
}

/// A counter-based generator on its own stream: `stream_rng(s, i)` and
/// `stream_rng(s, j)` are independent for i != j.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
