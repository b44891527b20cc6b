//! Dense linear operators between coordinate spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{random_nonzero_vector, stream_id, stream_rng};
use crate::sip::{dual_coords, lp_norm, Field, SipSpace, Vector};

/// Frame-level callers refuse to certify an operator whose condition
/// estimate exceeds this.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Relative pivot threshold used by [`LinearOperator::invert`].
pub const PIVOT_TOL: f64 = 1e-12;

/// Matrix of a linear map `domain → codomain`; `rows = codomain.dim()`,
/// `cols = domain.dim()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    matrix: DMatrix<Complex64>,
    domain: SipSpace,
    codomain: SipSpace,
}

impl LinearOperator {
    pub fn new(matrix: DMatrix<Complex64>, domain: SipSpace, codomain: SipSpace) -> Result<Self> {
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim(),
                found: matrix.nrows(),
            });
        }
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if domain.field() == Field::Real
            && codomain.field() == Field::Real
            && matrix.iter().any(|c| c.im != 0.0)
        {
            return Err(Error::ComplexInRealSpace);
        }
        Ok(Self {
            matrix,
            domain,
            codomain,
        })
    }

    /// Square operator on `space`.
    pub fn on(space: SipSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(matrix, space, space)
    }

    /// Square operator from real row-major entries.
    pub fn from_real_rows(space: SipSpace, rows: &[&[f64]]) -> Result<Self> {
        let n = space.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::on(space, m)
    }

    pub fn identity(space: SipSpace) -> Self {
        let n = space.dim();
        Self {
            matrix: DMatrix::identity(n, n),
            domain: space,
            codomain: space,
        }
    }

    pub fn zeros(domain: SipSpace, codomain: SipSpace) -> Self {
        Self {
            matrix: DMatrix::zeros(codomain.dim(), domain.dim()),
            domain,
            codomain,
        }
    }

    pub(crate) fn from_trusted(
        matrix: DMatrix<Complex64>,
        domain: SipSpace,
        codomain: SipSpace,
    ) -> Self {
        Self {
            matrix,
            domain,
            codomain,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn domain(&self) -> &SipSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &SipSpace {
        &self.codomain
    }

    pub fn is_square(&self) -> bool {
        self.matrix.nrows() == self.matrix.ncols()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.space().dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                found: x.space().dim(),
            });
        }
        Ok(Vector::from_trusted(
            self.codomain,
            mat_vec(&self.matrix, x.coords()),
        ))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if other.codomain.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                found: other.codomain.dim(),
            });
        }
        Ok(Self::from_trusted(
            &self.matrix * &other.matrix,
            other.domain,
            self.codomain,
        ))
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.check_same_shape(other)?;
        Ok(Self::from_trusted(
            &self.matrix + &other.matrix,
            self.domain,
            self.codomain,
        ))
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.check_same_shape(other)?;
        Ok(Self::from_trusted(
            &self.matrix - &other.matrix,
            self.domain,
            self.codomain,
        ))
    }

    pub fn scale(&self, lambda: Complex64) -> LinearOperator {
        Self::from_trusted(&self.matrix * lambda, self.domain, self.codomain)
    }

    /// `self ∘ self`.
    pub fn square(&self) -> Result<LinearOperator> {
        self.compose(self)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Max row-sum norm (the ℓ^∞ → ℓ^∞ operator norm).
    pub fn row_sum_norm(&self) -> f64 {
        row_sum_norm(&self.matrix)
    }

    fn check_same_shape(&self, other: &LinearOperator) -> Result<()> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(())
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.matrix.nrows(),
                cols: self.matrix.ncols(),
            });
        }
        Ok(())
    }

    pub fn invert(&self) -> Result<Inverse> {
        self.invert_with(InvertOptions::default())
    }

    /// Gauss–Jordan elimination with partial pivoting.
    pub fn invert_with(&self, opts: InvertOptions) -> Result<Inverse> {
        self.require_square()?;
        let n = self.matrix.nrows();
        let norm_a = row_sum_norm(&self.matrix);
        let threshold = opts.pivot_tol * norm_a;
        let mut a = self.matrix.clone();
        let mut inv = DMatrix::<Complex64>::identity(n, n);

        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= threshold || pivot_mag == 0.0 {
                return Err(Error::NotInvertible { pivot: pivot_mag });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let pivot_inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for j in 0..n {
                a[(col, j)] *= pivot_inv;
                inv[(col, j)] *= pivot_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)];
                    let iv = inv[(col, j)];
                    a[(r, j)] -= factor * av;
                    inv[(r, j)] -= factor * iv;
                }
            }
        }

        if opts.refine {
            // X ← X + X (I - A X)
            let residual = DMatrix::<Complex64>::identity(n, n) - &self.matrix * &inv;
            inv = &inv + &inv * residual;
        }

        let condition = norm_a * row_sum_norm(&inv);
        Ok(Inverse {
            inverse: Self::from_trusted(inv, self.codomain, self.domain),
            condition,
        })
    }

    /// The generalized adjoint `A†`, as a lazily evaluated map.
    pub fn adjoint(&self) -> Result<AdjointMap<'_>> {
        self.require_square()?;
        if self.domain != self.codomain {
            return Err(Error::SpaceMismatch);
        }
        Ok(AdjointMap { base: self })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InvertOptions {
    /// Pivots below `pivot_tol · ‖A‖_∞` are treated as zero.
    pub pivot_tol: f64,
    /// One step of iterative refinement.
    pub refine: bool,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self {
            pivot_tol: PIVOT_TOL,
            refine: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Inverse {
    pub inverse: LinearOperator,
    /// `‖A‖_∞ · ‖A⁻¹‖_∞` (max row-sum norms).
    pub condition: f64,
}

impl Inverse {
    pub fn is_well_conditioned(&self) -> bool {
        self.condition <= CONDITION_LIMIT
    }
}

/// `y ↦ A†y` with `[Ax, y] = [x, A†y]` for all `x`.
///
/// Evaluated as `J⁻¹(Aᵀ J(y))`: the functional `x ↦ [Ax, y]` has dual
/// coordinates `Aᵀ J(y)`, and the Riesz representer of that functional is
/// `A†y`. Nonlinear unless p = 2, where it reduces to `Aᴴ y`.
#[derive(Debug, Clone, Copy)]
pub struct AdjointMap<'a> {
    base: &'a LinearOperator,
}

impl AdjointMap<'_> {
    pub fn base(&self) -> &LinearOperator {
        self.base
    }

    pub fn apply(&self, y: &Vector) -> Result<Vector> {
        let space = self.base.domain;
        if y.space().dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: y.space().dim(),
            });
        }
        Ok(Vector::from_trusted(
            space,
            adjoint_coords(&self.base.matrix, y.coords(), space.p()),
        ))
    }
}

/// `A†y` for a square operator `A`.
pub fn generalized_adjoint_apply(a: &LinearOperator, y: &Vector) -> Result<Vector> {
    a.adjoint()?.apply(y)
}

pub(crate) fn adjoint_coords(a: &DMatrix<Complex64>, y: &[Complex64], p: f64) -> Vec<Complex64> {
    if p == 2.0 {
        return mat_h_vec(a, y);
    }
    let q = p / (p - 1.0);
    let g = dual_coords(y, p);
    let functional = mat_t_vec(a, &g);
    dual_coords(&functional, q)
}

pub(crate) fn mat_vec(a: &DMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

fn mat_t_vec(a: &DMatrix<Complex64>, g: &[Complex64]) -> Vec<Complex64> {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * g[i]).sum())
        .collect()
}

fn mat_h_vec(a: &DMatrix<Complex64>, y: &[Complex64]) -> Vec<Complex64> {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].conj() * y[i]).sum())
        .collect()
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub(crate) fn row_sum_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// --- mixed-norm estimation ----------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct PnormOptions {
    pub max_iters: usize,
    /// Stop a restart once the relative ratio improvement falls below this.
    pub improvement_tol: f64,
}

impl Default for PnormOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            improvement_tol: 1e-12,
        }
    }
}

pub const DEFAULT_RESTARTS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    /// Attained ratio `‖A w‖_{p_out} / ‖w‖_{p_in}`, a lower bound on the
    /// operator norm.
    pub lower_bound: f64,
    #[serde(serialize_with = "crate::io::serialize_vector")]
    pub witness: Vector,
    /// Every restart stopped on the improvement criterion rather than the
    /// iteration cap.
    pub converged: bool,
}

/// Lower bound on `sup ‖Ax‖_{p_out} / ‖x‖_{p_in}`.
///
/// Column probes `A e_j` seed the estimate, then each restart runs the
/// nonlinear power iteration
/// `x ← J_{q_in}(Aᵀ J_{p_out}(A x))` from a random start. The result is the
/// best ratio seen, recomputed at its witness.
pub fn pnorm_estimate(
    a: &LinearOperator,
    p_in: f64,
    p_out: f64,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    pnorm_estimate_with(a, p_in, p_out, restarts, seed, PnormOptions::default())
}

pub fn pnorm_estimate_with(
    a: &LinearOperator,
    p_in: f64,
    p_out: f64,
    restarts: usize,
    seed: u64,
    opts: PnormOptions,
) -> Result<NormEstimate> {
    let in_space = SipSpace::new(a.domain.dim(), p_in, a.domain.field())?;
    SipSpace::new(a.codomain.dim(), p_out, a.codomain.field())?;
    let m = &a.matrix;
    let ratio = |x: &[Complex64]| {
        let nx = lp_norm(x, p_in);
        if nx == 0.0 {
            0.0
        } else {
            lp_norm(&mat_vec(m, x), p_out) / nx
        }
    };

    let mut best_x = vec![Complex64::new(0.0, 0.0); in_space.dim()];
    best_x[0] = Complex64::new(1.0, 0.0);
    let mut best = ratio(&best_x);
    for j in 1..in_space.dim() {
        let mut e = vec![Complex64::new(0.0, 0.0); in_space.dim()];
        e[j] = Complex64::new(1.0, 0.0);
        let r = ratio(&e);
        if r > best {
            best = r;
            best_x = e;
        }
    }

    let q_in = p_in / (p_in - 1.0);
    let runs: Vec<(f64, Vec<Complex64>, bool)> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = stream_rng(seed, stream_id(&[restart as u64]));
            let mut x = random_nonzero_vector(&mut rng, &in_space).into_coords();
            let mut r = ratio(&x);
            let mut best_run = (r, x.clone());
            let mut converged = false;
            for _ in 0..opts.max_iters {
                let y = mat_vec(m, &x);
                let g = dual_coords(&y, p_out);
                let z = mat_t_vec(m, &g);
                let next = dual_coords(&z, q_in);
                let n = lp_norm(&next, p_in);
                if n == 0.0 {
                    converged = true;
                    break;
                }
                x = next.into_iter().map(|c| c / n).collect();
                let r_next = ratio(&x);
                if r_next > best_run.0 {
                    best_run = (r_next, x.clone());
                }
                if r_next - r < opts.improvement_tol * r.max(f64::MIN_POSITIVE) {
                    converged = true;
                    break;
                }
                r = r_next;
            }
            (best_run.0, best_run.1, converged)
        })
        .collect();

    let mut all_converged = true;
    for (r, x, converged) in runs {
        all_converged &= converged;
        if r > best {
            best = r;
            best_x = x;
        }
    }
    let witness = Vector::from_trusted(in_space, best_x);
    Ok(NormEstimate {
        lower_bound: ratio(witness.coords()),
        witness,
        converged: all_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_coords;
    use crate::sip::sip_eval;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_op(space: SipSpace, seed: u64) -> LinearOperator {
        let mut rng = stream_rng(seed, 0);
        let n = space.dim();
        let coords = random_coords(&mut rng, space.field(), n * n);
        LinearOperator::on(space, DMatrix::from_vec(n, n, coords)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let x = s.real_vector(&[2.0, -7.0]).unwrap();
        assert_eq!(LinearOperator::identity(s).apply(&x).unwrap(), x);
        assert!(LinearOperator::zeros(s, s).apply(&x).unwrap().is_zero());
        let swap = LinearOperator::from_real_rows(s, &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(
            swap.apply(&x).unwrap(),
            s.real_vector(&[-7.0, 2.0]).unwrap()
        );
        let t = SipSpace::new(3, 3.0, Field::Real).unwrap();
        assert!(swap.apply(&t.zero()).is_err());
    }

    #[test]
    fn invert_examples() {
        let s = SipSpace::new(2, 2.0, Field::Real).unwrap();
        let id = LinearOperator::identity(s).invert().unwrap();
        assert_eq!(id.inverse.matrix(), &DMatrix::identity(2, 2));
        assert_eq!(id.condition, 1.0);

        let d = LinearOperator::from_real_rows(s, &[&[2.0, 0.0], &[0.0, 4.0]]).unwrap();
        let inv = d.invert().unwrap();
        assert!((inv.inverse.matrix()[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((inv.inverse.matrix()[(1, 1)] - c(0.25)).norm() < 1e-15);
        assert!(inv.condition <= 2.0 + 1e-15);

        let s8 = SipSpace::new(8, 2.0, Field::Complex).unwrap();
        let a = random_op(s8, 3).add(&LinearOperator::identity(s8).scale(c(4.0))).unwrap();
        let inv = a.invert().unwrap();
        let resid = &a.matrix * inv.inverse.matrix() - DMatrix::<Complex64>::identity(8, 8);
        assert!(max_abs(&resid) <= 1e-10);
        assert!(max_abs(&resid) <= 1e-8 * inv.condition);
    }

    #[test]
    fn invert_with_refinement_is_no_worse() {
        let s = SipSpace::new(6, 2.0, Field::Real).unwrap();
        let a = random_op(s, 9);
        let plain = a.invert().unwrap();
        let refined = a
            .invert_with(InvertOptions {
                refine: true,
                ..Default::default()
            })
            .unwrap();
        let id = DMatrix::<Complex64>::identity(6, 6);
        let r1 = max_abs(&(&a.matrix * plain.inverse.matrix() - &id));
        let r2 = max_abs(&(&a.matrix * refined.inverse.matrix() - &id));
        assert!(r2 <= r1.max(1e-14) * 10.0);
    }

    #[test]
    fn singular_is_rejected_with_pivot() {
        let s = SipSpace::new(2, 2.0, Field::Real).unwrap();
        let a = LinearOperator::from_real_rows(s, &[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        match a.invert() {
            Err(Error::NotInvertible { pivot }) => assert!(pivot < 1e-12 * 6.0),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
        assert!(matches!(
            LinearOperator::zeros(s, s).invert(),
            Err(Error::NotInvertible { .. })
        ));
        let rect = LinearOperator::zeros(s, SipSpace::new(3, 2.0, Field::Real).unwrap());
        assert!(matches!(rect.invert(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn adjoint_hilbert_is_conjugate_transpose() {
        let s = SipSpace::new(3, 2.0, Field::Complex).unwrap();
        let a = random_op(s, 1);
        let mut rng = stream_rng(2, 0);
        let y = crate::rng::random_vector(&mut rng, &s);
        let got = generalized_adjoint_apply(&a, &y).unwrap();
        let expect = a.matrix.adjoint() * DMatrix::from_column_slice(3, 1, y.coords());
        for i in 0..3 {
            assert!((got.coords()[i] - expect[(i, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_of_identity_and_at_zero() {
        for p in [1.5, 3.0] {
            let s = SipSpace::new(3, p, Field::Complex).unwrap();
            let mut rng = stream_rng(4, 0);
            let y = crate::rng::random_vector(&mut rng, &s);
            let id = LinearOperator::identity(s);
            assert!(generalized_adjoint_apply(&id, &y).unwrap().max_abs_diff(&y) < 1e-12);
            let a = random_op(s, 5);
            assert!(generalized_adjoint_apply(&a, &s.zero()).unwrap().is_zero());
        }
    }

    #[test]
    fn adjoint_defining_identity() {
        for p in [1.5, 2.0, 3.0] {
            let s = SipSpace::new(4, p, Field::Complex).unwrap();
            let a = random_op(s, 6);
            let mut rng = stream_rng(7, 0);
            for _ in 0..30 {
                let x = crate::rng::random_vector(&mut rng, &s);
                let y = crate::rng::random_vector(&mut rng, &s);
                let lhs = sip_eval(&a.apply(&x).unwrap(), &y).unwrap();
                let rhs = sip_eval(&x, &generalized_adjoint_apply(&a, &y).unwrap()).unwrap();
                let tol = 1e-8 * (1.0 + a.row_sum_norm()) * x.norm() * y.norm();
                assert!((lhs - rhs).norm() <= tol, "p={p}");
            }
        }
    }

    #[test]
    fn adjoint_conjugate_homogeneity() {
        let s = SipSpace::new(3, 3.0, Field::Complex).unwrap();
        let a = random_op(s, 8);
        let lambda = Complex64::new(0.7, -1.3);
        let mut rng = stream_rng(9, 0);
        let y = crate::rng::random_vector(&mut rng, &s);
        let lhs = generalized_adjoint_apply(&a.scale(lambda), &y).unwrap();
        let rhs = generalized_adjoint_apply(&a, &y).unwrap().scale(lambda.conj());
        assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn pnorm_identity_and_diagonal() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            let s = SipSpace::new(2, p, Field::Real).unwrap();
            let est = pnorm_estimate(&LinearOperator::identity(s), p, p, 4, 1).unwrap();
            assert_eq!(est.lower_bound, 1.0);
            assert!((est.witness.norm() - 1.0).abs() < 1e-12);

            let d = LinearOperator::from_real_rows(s, &[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
            let est = pnorm_estimate(&d, p, p, 4, 1).unwrap();
            assert_eq!(est.lower_bound, 2.0);
            assert!(est.witness.max_abs_diff(&s.basis(0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn pnorm_witness_attains_ratio() {
        let s = SipSpace::new(3, 3.0, Field::Complex).unwrap();
        let a = random_op(s, 12);
        let est = pnorm_estimate(&a, 3.0, 1.5, 8, 3).unwrap();
        let w = &est.witness;
        let ratio = lp_norm(&mat_vec(&a.matrix, w.coords()), 1.5) / lp_norm(w.coords(), 3.0);
        assert!((ratio - est.lower_bound).abs() <= 1e-10 * est.lower_bound);
    }

    #[test]
    fn pnorm_monotone_in_restarts() {
        let s = SipSpace::new(4, 1.5, Field::Real).unwrap();
        let a = random_op(s, 21);
        let mut prev = 0.0;
        for r in 1..=10 {
            let est = pnorm_estimate(&a, 1.5, 1.5, r, 77).unwrap();
            assert!(est.lower_bound >= prev);
            prev = est.lower_bound;
        }
    }
}
