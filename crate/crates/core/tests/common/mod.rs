//! Reference formulas written directly from the definitions, sharing no code
//! with the library kernels.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;

use pasflab_core::{Field, SipSpace, Vector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(Σ |x_n|^p)^(1/p)`, unscaled.
pub fn naive_norm(x: &[Complex64], p: f64) -> f64 {
    x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `Σ x_n conj(y_n) |y_n|^(p-2) / ‖y‖^(p-2)`, with `[x, 0] = 0`.
pub fn naive_sip(x: &[Complex64], y: &[Complex64], p: f64) -> Complex64 {
    let ny = naive_norm(y, p);
    if ny == 0.0 {
        return c(0.0, 0.0);
    }
    x.iter()
        .zip(y)
        .filter(|(_, b)| b.norm() > 0.0)
        .map(|(a, b)| a * b.conj() * (b.norm() / ny).powf(p - 2.0))
        .sum()
}

pub fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

/// A space with `1.1 ≤ p ≤ 10`.
pub fn space_strategy(max_dim: usize) -> impl Strategy<Value = SipSpace> {
    (1..=max_dim, 1.1f64..10.0, field_strategy())
        .prop_map(|(d, p, f)| SipSpace::new(d, p, f).unwrap())
}

/// Coordinates in `[-1, 1]` (and `[-1, 1]i` for complex spaces).
pub fn coords_for(space: SipSpace) -> impl Strategy<Value = Vec<Complex64>> {
    let complex = space.field() == Field::Complex;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), space.dim()).prop_map(move |v| {
        v.into_iter()
            .map(|(re, im)| c(re, if complex { im } else { 0.0 }))
            .collect()
    })
}

pub fn vector_for(space: SipSpace) -> impl Strategy<Value = Vector> {
    coords_for(space).prop_map(move |v| space.vector(v).unwrap())
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}
