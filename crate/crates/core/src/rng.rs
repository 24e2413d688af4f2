//! Deterministic random draws, pinned bit-for-bit.
//!
//! Matrix entries, noise, and every other stochastic choice in the library
//! flow through this one generator so that a (distribution, seed, shape)
//! triple identifies the exact same artifact on every machine. The generator
//! is SplitMix64: a 64-bit counter advanced by a fixed odd increment, pushed
//! through an avalanching finalizer. It is small enough to restate in any
//! language, which is the point — files that store only a seed must be
//! reproducible outside this codebase too.

/// Golden-ratio increment that steps the SplitMix64 counter.
pub const SPLITMIX_INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;

const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;

/// The SplitMix64 finalizer on its own: xor-shift 30, multiply, xor-shift 27,
/// multiply, xor-shift 31. Used both inside the generator and to derive
/// sub-seeds (row streams, noise streams) from a master seed.
#[inline]
pub fn mix(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    /// Pending second Box--Muller output; the cosine leg is handed out first,
    /// the sine leg is cached here for the next gaussian request.
    pending_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 {
            state: seed,
            pending_gaussian: None,
        }
    }

    /// Stream for row `r` of a measurement matrix: an independent generator
    /// seeded with `mix(seed ^ r)`, so rows can be produced in any order or
    /// in parallel without changing a single bit.
    pub fn for_row(master_seed: u64, r: u64) -> Self {
        SplitMix64::new(mix(master_seed ^ r))
    }

    /// Stream `index` of a tagged domain under `seed`.
    ///
    /// [`SplitMix64::for_row`] states are `mix(seed ^ r)`, so two plain
    /// XOR-derived domains hand out identical streams whenever
    /// `seed1 ^ i1 == seed2 ^ i2` — easy to hit with small seeds and small
    /// indices, and enough to make "independent" draws exact copies of
    /// measurement-matrix rows. Matrix rows own the untagged space by
    /// contract; every other per-index consumer goes through here, where
    /// the extra mix of `seed ^ tag` scatters the domain across the full
    /// state space first.
    pub fn for_stream(seed: u64, tag: u64, index: u64) -> Self {
        SplitMix64::new(mix(mix(seed ^ tag) ^ index))
    }

    /// Next raw 64-bit draw.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(SPLITMIX_INCREMENT);
        mix(self.state)
    }

    /// Uniform in (0, 1): the top 53 bits of a draw scaled by 2^-53.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal via Box--Muller on a pair of consecutive uniforms.
    /// The pair yields r*cos(theta) first and r*sin(theta) on the following
    /// call, so a full matrix consumes exactly ceil(n/2) pairs in fill order.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.pending_gaussian.take() {
            return z;
        }
        let mut u1 = self.next_uniform();
        if u1 == 0.0 {
            // The uniform map can produce an exact 0 once per 2^53 draws,
            // which ln() cannot take; substitute the smallest nonzero value
            // the map yields. Unreachable in any realistic stream.
            u1 = 1.0 / (1u64 << 53) as f64;
        }
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.pending_gaussian = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Rademacher draw from the top bit: set bit means -1, clear means +1.
    #[inline]
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_a_permutation_on_samples() {
        // Spot-check injectivity on a few inputs; the finalizer is bijective
        // by construction (xorshift and odd multiplication both invert).
        let inputs = [0u64, 1, 2, 0xFFFF_FFFF_FFFF_FFFF, 0x1234_5678_9ABC_DEF0];
        let mut outputs: Vec<u64> = inputs.iter().map(|&x| mix(x)).collect();
        outputs.sort_unstable();
        outputs.dedup();
        assert_eq!(outputs.len(), inputs.len());
    }

    #[test]
    fn known_splitmix_sequence() {
        // Reference values for seed 1234567, produced by the canonical
        // SplitMix64 description (same constants, same shifts).
        let mut g = SplitMix64::new(1234567);
        let draws: Vec<u64> = (0..3).map(|_| g.next_u64()).collect();
        assert_eq!(draws[0], 6457827717110365317);
        assert_eq!(draws[1], 3203168211198807973);
        assert_eq!(draws[2], 9817491932198370423);
    }

    #[test]
    fn uniforms_strictly_inside_unit_interval_in_practice() {
        let mut g = SplitMix64::new(42);
        for _ in 0..10_000 {
            let u = g.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_pairs_come_out_cosine_first() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        let u1 = b.next_uniform();
        let u2 = b.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        assert_eq!(a.next_gaussian(), radius * angle.cos());
        assert_eq!(a.next_gaussian(), radius * angle.sin());
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut g = SplitMix64::new(99);
        let n = 200_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.next_gaussian();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn signs_are_balanced() {
        let mut g = SplitMix64::new(5);
        let total: f64 = (0..100_000).map(|_| g.next_sign()).sum();
        assert!(total.abs() < 2_000.0, "imbalance {total}");
    }

    #[test]
    fn row_streams_are_independent_of_generation_order() {
        let row3_first: Vec<u64> = {
            let mut g = SplitMix64::for_row(11, 3);
            (0..4).map(|_| g.next_u64()).collect()
        };
        // Generate some other rows in between; row 3 must not care.
        let mut g0 = SplitMix64::for_row(11, 0);
        g0.next_u64();
        let row3_again: Vec<u64> = {
            let mut g = SplitMix64::for_row(11, 3);
            (0..4).map(|_| g.next_u64()).collect()
        };
        assert_eq!(row3_first, row3_again);
    }
}
