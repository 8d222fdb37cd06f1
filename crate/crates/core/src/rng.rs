//! Deterministic random source for the simulator.
//!
//! Uniform stream: **SplitMix64** (Vigna's public-domain reference
//! implementation — state advances by the golden-ratio increment
//! 0x9E3779B97F4A7C15, output is mixed with the 0xBF58476D1CE4E5B9 /
//! 0x94D049BB133111EB finalizer). Normal variates: the trigonometric
//! **Box–Muller** transform, cosine branch only. Each normal variate
//! consumes exactly two raw u64 draws:
//!
//! ```text
//! u1 = ((next_u64() >> 11) + 1) · 2⁻⁵³   ∈ (0, 1]
//! u2 =  (next_u64() >> 11)      · 2⁻⁵³   ∈ [0, 1)
//! z  = sqrt(−2 ln u1) · cos(2π u2)
//! ```
//!
//! The sine branch is discarded on purpose: with no cached spare, the
//! mapping from seed to the k-th variate is position-independent, which
//! keeps the simulator's documented draw order auditable. This generator
//! and transform are frozen — changing either silently breaks every
//! recorded cohort, so don't.
//!
//! Determinism: the stream depends only on the seed. `ln`/`sqrt`/`cos`
//! come from the platform libm, so byte-identical output is guaranteed for
//! a given build target; different C libraries could in principle differ
//! in the last ulp of the transcendentals.

/// SplitMix64 uniform generator with a Box–Muller normal sampler on top.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Next raw 64-bit output of the reference algorithm.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal variate. Consumes exactly two u64 draws.
    pub fn next_normal(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        // (0,1]: the +1 shift rules out ln(0) without biasing any
        // representable value by more than one ulp of the grid.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.next_u64() >> 11) as f64 * SCALE;
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Golden outputs computed with an independent implementation of the
    // published algorithm before this module was written. The seed-0 value
    // 0xe220a8397b1dcdaf is the reference implementation's own first output.
    #[test]
    fn matches_reference_stream() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(rng.next_u64(), 0x06c45d188009454f);

        let mut rng = SplitMix64::new(42);
        let first: Vec<u64> = (0..6).map(|_| rng.next_u64()).collect();
        assert_eq!(
            first,
            [
                0xbdd732262feb6e95,
                0x28efe333b266f103,
                0x47526757130f9f52,
                0x581ce1ff0e4ae394,
                0x09bc585a244823f2,
                0xde4431fa3c80db06,
            ]
        );

        let mut rng = SplitMix64::new(0xdeadbeef);
        assert_eq!(rng.next_u64(), 0x4adfb90f68c9eb9b);
    }

    #[test]
    fn normal_stream_matches_cross_computed_values() {
        let mut rng = SplitMix64::new(42);
        let want = [
            0.4147197504315305,
            -0.8918862136277562,
            1.7295930879374015,
            0.5456204361828646,
            -1.080412954982541,
            -1.7788480910585858,
        ];
        for w in want {
            let z = rng.next_normal();
            assert!((z - w).abs() < 1e-12, "got {z}, want {w}");
        }
    }

    #[test]
    fn uniforms_live_in_unit_interval() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut rng = SplitMix64::new(1234);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        for _ in 0..1000 {
            assert_eq!(a.next_normal().to_bits(), b.next_normal().to_bits());
        }
    }
}
