//! Deterministic sampling: low-discrepancy grids over the parameter domain
//! and counter-based random streams.
//!
//! One 64-bit seed governs all probe generation. Streams are split with the
//! ChaCha stream mechanism: the stream id is `fnv1a64(label) + index`, so a
//! (check id, point index) pair always sees the same substream regardless of
//! evaluation order.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

/// FNV-1a hash used to key random streams by check id.
pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seeded, splittable random stream.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream keyed by `(seed, label, index)`.
    pub fn new(seed: u64, label: &str, index: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a64(label).wrapping_add(index));
        Stream { rng }
    }

    /// Uniform in `[0, 1)` from the top 53 bits of a draw.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        self.range(-1.0, 1.0)
    }

    /// A vector of `n` coefficients in `[-1, 1)`.
    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.symmetric()).collect()
    }
}

/// Radical-inverse in the given base (van der Corput sequence).
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Sample points over a rectangular domain: `grid` Halton points followed by
/// `extra` seeded random points. Ordering is fixed by index.
pub fn sample_points(domain: &[[f64; 2]], grid: usize, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = domain.len();
    let mut pts = Vec::with_capacity(grid + extra);
    for i in 0..grid {
        let mut p = Vec::with_capacity(dim);
        for (d, range) in domain.iter().enumerate() {
            // Offset by one to skip the all-zeros corner sample.
            let t = radical_inverse((i + 1) as u64, HALTON_BASES[d % HALTON_BASES.len()]);
            p.push(range[0] + (range[1] - range[0]) * t);
        }
        pts.push(p);
    }
    let mut stream = Stream::new(seed, "sample-points", 0);
    for _ in 0..extra {
        let p = domain
            .iter()
            .map(|range| stream.range(range[0], range[1]))
            .collect();
        pts.push(p);
    }
    pts
}

/// Largest absolute value in a slice (0 for empty slices).
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().map(|v| math::fabs(*v)).fold(0.0, math::fmax)
}
