#![allow(dead_code)]

use modtheta::precision::{BigFloat, RealInput};
use num_bigint::{BigInt, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn silver() -> RealInput {
    RealInput::surd_i(-1, 1, 2, 1)
}

pub fn golden() -> RealInput {
    RealInput::surd_i(-1, 1, 5, 2)
}

/// Uniform reals in (0,1) with a full 192-bit mantissa.
pub fn random_reals(seed: u64, count: usize) -> Vec<RealInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut bytes = [0u8; 24];
            rng.fill(&mut bytes[..]);
            bytes[0] |= 0x80;
            let m = BigInt::from_bytes_be(Sign::Plus, &bytes);
            RealInput::Float(BigFloat::from_parts(m, -193, 192))
        })
        .collect()
}
