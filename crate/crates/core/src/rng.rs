//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! user seed plus a stream id, so independent work items (subsets, restarts,
//! retries) get reproducible, non-overlapping sequences regardless of the
//! order they are executed in.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sip::{Field, SipSpace, Vector};

pub type StreamRng = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a tuple of ids into one stream id (splitmix64 finalizer chain).
pub fn stream_id(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9e37_79b9_7f4a_7c15, |acc, &part| {
        splitmix64(acc ^ splitmix64(part))
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on [-1, 1] in each of the real and imaginary parts.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> Complex64 {
    let re = rng.random_range(-1.0..=1.0);
    match field {
        Field::Real => Complex64::new(re, 0.0),
        Field::Complex => Complex64::new(re, rng.random_range(-1.0..=1.0)),
    }
}

pub fn random_coords<R: Rng + ?Sized>(rng: &mut R, field: Field, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| random_scalar(rng, field)).collect()
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, space: &SipSpace) -> Vector {
    Vector::from_trusted(*space, random_coords(rng, space.field(), space.dim()))
}

/// Random vector that is not (numerically) zero.
pub fn random_nonzero_vector<R: Rng + ?Sized>(rng: &mut R, space: &SipSpace) -> Vector {
    loop {
        let v = random_vector(rng, space);
        if v.norm() > 1e-6 {
            return v;
        }
    }
}
