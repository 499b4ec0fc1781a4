//! Seeded random number generation.
//!
//! All randomness in the crate flows through [`SeededRng`], which is
//! ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`) seeded via
//! `SeedableRng::seed_from_u64`. Its output stream is value-stable across
//! `rand_chacha` releases, so experiments reproduce bit for bit. Derived
//! seeds for independent realizations are `seed + r` (wrapping).
//!
//! Uniform `f64` draws use `rand`'s standard 53-bit conversion; Gaussian
//! draws use `rand_distr::StandardNormal` (ziggurat).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `r`-th realization derived from a base seed.
#[inline]
pub fn derived_seed(seed: u64, r: u64) -> u64 {
    seed.wrapping_add(r)
}

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn standard_normal_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

/// Uniformly distributed unit vector in `ℝⁿ`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = standard_normal_vec(rng, n);
        let norm = crate::scalar::norm2(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    // First four u64 outputs of the generator for seed 42. Any change here
    // means every committed experiment output changes too.
    const SEED42_REFERENCE: [u64; 4] = [
        0xae90_bfb5_395d_5ba1,
        0xf345_3fc6_2579_9188,
        0x6d71_b708_c5b6_538c,
        0xa09a_b2f9_5816_6752,
    ];

    #[test]
    fn reference_sequence_seed_42() {
        let mut rng = rng_from_seed(42);
        let got: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        assert_eq!(got, SEED42_REFERENCE, "got {got:#x?}");
    }

    #[test]
    fn derived_seeds_wrap() {
        assert_eq!(derived_seed(u64::MAX, 1), 0);
        assert_eq!(derived_seed(42, 3), 45);
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = rng_from_seed(7);
        for n in 1..6 {
            let v = random_unit_vector(&mut rng, n);
            assert!((crate::scalar::norm2(&v) - 1.0).abs() < 1e-14);
        }
    }
}
