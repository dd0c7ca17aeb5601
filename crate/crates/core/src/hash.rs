//! Counter-based hashing for lazily realized random fields and seed streams.
//!
//! Every random quantity in the crate is a pure function of a tuple of 64-bit
//! words. The rule, bit for bit:
//!
//! ```text
//! mix64(z):  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!            z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!            return z ^ (z >> 31)                       (wrapping u64 arithmetic)
//!
//! hash(w_0, ..., w_k):  h = 0
//!                       for w in words: h = mix64((h + 0x9e3779b97f4a7c15) ^ w)
//!                       return h
//! ```
//!
//! Signed lattice coordinates enter as their two's-complement `u64` bit
//! pattern. A site `(x, y)` of a field with seed `s` draws from
//! `uniform(hash(s, x, y))`, where `uniform(h) = (h >> 11) * 2^-53`.
//! Replicate `i` of a master seed `m` uses field seed `hash(m, i)`; a Monte
//! Carlo stream for replicate `i` and grid index `j` uses `hash(m, i, j)`.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn hash_words(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0u64, |h, &w| mix64(h.wrapping_add(GOLDEN) ^ w))
}

#[inline]
pub fn site_hash(seed: u64, x: i64, y: i64) -> u64 {
    mix64(mix64(mix64(GOLDEN ^ seed).wrapping_add(GOLDEN) ^ x as u64).wrapping_add(GOLDEN) ^ y as u64)
}

/// Top 53 bits of `h` as a uniform value in `[0, 1)`.
#[inline]
pub fn uniform(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Field seed of replicate `index` under `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    hash_words(&[master, index])
}

/// Monte Carlo stream seed for replicate `replicate` at grid index `grid`.
pub fn stream_seed(master: u64, replicate: u64, grid: u64) -> u64 {
    hash_words(&[master, replicate, grid])
}
