//! Seed-partition contract for Monte-Carlo work.
//!
//! A run with base seed `s` is split into lanes (one per independent
//! quantity, e.g. a pair experiment or a context) and each lane into chunks
//! of [`CHUNK_SIZE`] samples. Chunk `c` of lane `l` draws from ChaCha8
//! seeded with `s` on stream `(l << 32) | c`. Streams never overlap, and the
//! result of a run depends only on `(s, lane, chunk)`, not on how chunks are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const CHUNK_SIZE: u64 = 1 << 14;

pub fn stream_id(lane: u32, chunk: u32) -> u64 {
    (u64::from(lane) << 32) | u64::from(chunk)
}

pub fn chunk_rng(seed: u64, lane: u32, chunk: u32) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(lane, chunk));
    rng
}

/// Number of chunks covering `total` samples.
pub fn chunk_count(total: u64) -> u32 {
    let n = total.div_ceil(CHUNK_SIZE);
    u32::try_from(n).expect("sample count too large for the chunk index space")
}

/// Samples in chunk `chunk` of a `total`-sample run.
pub fn chunk_len(total: u64, chunk: u32) -> u64 {
    let start = u64::from(chunk) * CHUNK_SIZE;
    total.saturating_sub(start).min(CHUNK_SIZE)
}

/// Derives an independent seed for sweep point `index` of a run seeded with `base`
/// (splitmix64 finalizer over `base + index`).
pub fn point_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)`.
#[inline]
pub fn uniform(rng: &mut StreamRng) -> f64 {
    use rand::Rng;
    rng.random::<f64>()
}

/// Exponential draw with unit mean.
#[inline]
pub fn exponential(rng: &mut StreamRng) -> f64 {
    -crate::math::ln(1.0 - uniform(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_total() {
        for total in [1u64, CHUNK_SIZE - 1, CHUNK_SIZE, CHUNK_SIZE + 1, 1_000_000] {
            let n = chunk_count(total);
            let sum: u64 = (0..n).map(|c| chunk_len(total, c)).sum();
            assert_eq!(sum, total);
            assert!((0..n).all(|c| chunk_len(total, c) > 0));
        }
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: [f64; 4] = core::array::from_fn({
            let mut r = chunk_rng(7, 0, 0);
            move |_| uniform(&mut r)
        });
        let b: [f64; 4] = core::array::from_fn({
            let mut r = chunk_rng(7, 0, 0);
            move |_| uniform(&mut r)
        });
        let c: [f64; 4] = core::array::from_fn({
            let mut r = chunk_rng(7, 0, 1);
            move |_| uniform(&mut r)
        });
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
    }
}
