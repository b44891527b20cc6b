mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pasflab_core::operators::{generalized_adjoint_apply, pnorm_estimate};
use pasflab_core::rng::{random_coords, random_vector, stream_rng};
use pasflab_core::{Field, LinearOperator, SipSpace};

fn random_operator(space: SipSpace, seed: u64) -> LinearOperator {
    let mut rng = stream_rng(seed, 99);
    let d = space.dim();
    let m = DMatrix::from_vec(d, d, random_coords(&mut rng, space.field(), d * d));
    LinearOperator::on(space, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn adjoint_defining_identity(s in space_strategy(6), seed in any::<u64>()) {
        let a = random_operator(s, seed);
        let mut rng = stream_rng(seed, 1);
        let x = random_vector(&mut rng, &s);
        let y = random_vector(&mut rng, &s);
        let lhs = a.apply(&x).unwrap().sip(&y).unwrap();
        let rhs = x.sip(&generalized_adjoint_apply(&a, &y).unwrap()).unwrap();
        let scale = 1.0 + a.row_sum_norm() * x.norm() * y.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * scale);
    }

    #[test]
    fn adjoint_is_conjugate_homogeneous(
        s in space_strategy(6),
        seed in any::<u64>(),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let lambda = if s.field() == Field::Real { c(re, 0.0) } else { c(re, im) };
        let a = random_operator(s, seed);
        let y = random_vector(&mut stream_rng(seed, 2), &s);
        let lhs = generalized_adjoint_apply(&a.scale(lambda), &y).unwrap();
        let rhs = generalized_adjoint_apply(&a, &y).unwrap().scale(lambda.conj());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn adjoint_collapses_to_conjugate_transpose(
        d in 1usize..7,
        field in field_strategy(),
        seed in any::<u64>(),
    ) {
        let s = SipSpace::new(d, 2.0, field).unwrap();
        let a = random_operator(s, seed);
        let y = random_vector(&mut stream_rng(seed, 3), &s);
        let got = generalized_adjoint_apply(&a, &y).unwrap();
        let want = a.matrix().adjoint() * nalgebra::DVector::from_column_slice(y.coords());
        let diff = got
            .coords()
            .iter()
            .zip(want.iter())
            .map(|(g, w)| (g - w).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12);
    }

    #[test]
    fn inverse_is_two_sided(s in space_strategy(6), seed in any::<u64>()) {
        // Diagonal dominance keeps the draw comfortably invertible.
        let d = s.dim();
        let a = random_operator(s, seed)
            .add(&LinearOperator::identity(s).scale(c(2.0 * d as f64, 0.0)))
            .unwrap();
        let inv = a.invert().unwrap();
        prop_assert!(inv.is_well_conditioned());
        let id = LinearOperator::identity(s);
        let left = inv.inverse.compose(&a).unwrap().sub(&id).unwrap().max_abs();
        let right = a.compose(&inv.inverse).unwrap().sub(&id).unwrap().max_abs();
        prop_assert!(left <= 1e-12 && right <= 1e-12);
    }

    #[test]
    fn norm_estimate_is_between_column_and_holder_bounds(s in space_strategy(5), seed in any::<u64>()) {
        let a = random_operator(s, seed);
        let p = s.p();
        let q = s.conjugate_exponent();
        let est = pnorm_estimate(&a, p, p, 4, seed).unwrap();
        let m = a.matrix();
        let col_best = (0..m.ncols())
            .map(|j| naive_norm(&m.column(j).iter().copied().collect::<Vec<_>>(), p))
            .fold(0.0, f64::max);
        // ‖A‖_{p→p} ≤ (Σ_i ‖row_i‖_q^p)^(1/p) by Hölder.
        let holder = (0..m.nrows())
            .map(|i| naive_norm(&m.row(i).iter().copied().collect::<Vec<_>>(), q).powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        prop_assert!(est.lower_bound >= col_best * (1.0 - 1e-12));
        prop_assert!(est.lower_bound <= holder * (1.0 + 1e-12));
        let ratio = a.apply(&est.witness).unwrap().norm() / est.witness.norm();
        prop_assert!((ratio - est.lower_bound).abs() <= 1e-12 * ratio.max(1.0));
    }
}

#[test]
fn hilbert_norm_matches_largest_singular_value() {
    for seed in 0..20u64 {
        let field = if seed % 2 == 0 { Field::Real } else { Field::Complex };
        let s = SipSpace::new(1 + (seed as usize % 5), 2.0, field).unwrap();
        let a = random_operator(s, seed);
        let sigma = a.matrix().clone().singular_values().max();
        let est = pnorm_estimate(&a, 2.0, 2.0, 8, seed).unwrap();
        assert!((est.lower_bound - sigma).abs() <= 1e-6 * sigma, "seed {seed}");
    }
}

#[test]
fn diagonal_norm_is_exact() {
    for &p in &[1.2, 1.5, 2.0, 3.0, 6.0] {
        let s = SipSpace::new(4, p, Field::Complex).unwrap();
        let d = [c(0.5, 0.0), c(0.0, -3.0), c(1.0, 1.0), c(-2.0, 0.0)];
        let a = LinearOperator::on(s, DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d)))
            .unwrap();
        let est = pnorm_estimate(&a, p, p, 2, 5).unwrap();
        let want = d.iter().map(|z: &Complex64| z.norm()).fold(0.0, f64::max);
        assert_eq!(est.lower_bound, want, "p = {p}");
    }
}
