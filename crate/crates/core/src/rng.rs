//! Random streams.
//!
//! Every randomized operation takes an explicit stream. Streams are ChaCha
//! generators, which are counter based: a `(seed, stream id)` pair names an
//! independent sequence, so per-trial streams can be derived without any
//! shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type Stream = ChaCha12Rng;

/// The root stream for `seed`.
pub fn root(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Independent stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = Stream::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
