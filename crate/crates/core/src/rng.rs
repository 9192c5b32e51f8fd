//! Reproducible random streams.
//!
//! Stream `i` of master seed `s` is ChaCha8 keyed by `seed_from_u64(s)` with
//! its stream counter set to `i`. Streams of one seed never overlap, and a
//! stream depends only on `(s, i)`, so replicas can run in any order or on
//! any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let draw = |index| {
            let mut rng = stream_rng(7, index);
            (0..4).map(|_| rng.random::<u64>()).collect::<Vec<_>>()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
    }
}
