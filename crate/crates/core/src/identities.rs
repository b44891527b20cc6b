//! Frame identities and the 3/4 lower bound.
//!
//! Every identity is evaluated twice: by literal summation over frame
//! elements, and by composing operators (`S_M`, `S⁻¹`, `S_M†`). The two
//! routes share only the semi-inner-product kernel, so disagreement between
//! them points at an implementation error rather than at the mathematics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{IndexSet, Pasf, PARSEVAL_TOL};
use crate::operators::{adjoint_coords, mat_vec, max_abs, row_sum_norm, LinearOperator};
use crate::sip::{dot, dual_coords, lp_norm, sip_coords, Vector};

/// Default relative tolerance for identities built from composed nonlinear
/// maps.
pub const DEFAULT_TOL_REL: f64 = 1e-7;
/// Parseval identity tolerance (pure summation, no inverse).
pub const PARSEVAL_TOL_REL: f64 = 1e-8;
/// Agreement required between the summation and operator routes.
pub const PATH_TOL: f64 = 1e-7;
/// `U + V = I` precondition and the lemma's residual tolerance.
pub const LEMMA_TOL: f64 = 1e-10;
/// `h(x) ≥ -HYPOTHESIS_SLACK` counts as the hypothesis holding.
pub const HYPOTHESIS_SLACK: f64 = 1e-10;

/// Two sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs - rhs|`.
    pub residual: f64,
    /// `max(1, |lhs|, |rhs|)` for scalar identities.
    pub scale: f64,
    pub tol: f64,
    /// `residual ≤ tol · scale`.
    pub passed: bool,
    /// Largest disagreement between the summation and operator routes,
    /// over both sides. Zero when only one route exists.
    pub path_gap: f64,
}

impl IdentityResult {
    fn scalar(lhs: Complex64, rhs: Complex64, tol: f64, path_gap: f64) -> Self {
        let residual = (lhs - rhs).norm();
        let scale = 1f64.max(lhs.norm()).max(rhs.norm());
        Self {
            lhs,
            rhs,
            residual,
            scale,
            tol,
            passed: residual <= tol * scale,
            path_gap,
        }
    }

    /// `residual / scale`.
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

/// Evaluation of the 3/4 bound at one `(M, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    /// Real part of `Q(x) = Σ_{M}[x,ω_n][τ_n,x] + Σ_{n,k∈M^c}[x,ω_n][τ_n,ω_k][τ_k,x]`.
    pub q_value: f64,
    pub q_imag: f64,
    /// `|Q(x) - Q'(x)|` against the form with M and M^c exchanged.
    pub symmetric_gap: f64,
    /// Real part of `h(x) = [(S_M - ½I)²x, x]`.
    pub hypothesis_value: f64,
    pub hypothesis_imag: f64,
    pub norm_sq: f64,
    /// `q_value / norm_sq`.
    pub ratio: f64,
    pub hypothesis_holds: bool,
}

/// `(U - V) = U² - V²` whenever `U + V = I`.
///
/// `lhs`/`rhs` hold the largest entries of `U - V` and `U² - V²`; the
/// residual is the largest entry of their difference and the scale is
/// `1 + ‖U‖_∞²`.
pub fn lemma_uv_check(u: &LinearOperator, v: &LinearOperator) -> Result<IdentityResult> {
    if !u.is_square() {
        let (rows, cols) = u.matrix().shape();
        return Err(Error::NotSquare { rows, cols });
    }
    if u.matrix().shape() != v.matrix().shape() {
        return Err(Error::DimensionMismatch {
            expected: u.matrix().nrows(),
            found: v.matrix().nrows(),
        });
    }
    let (um, vm) = (u.matrix(), v.matrix());
    let n = um.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let complement = max_abs(&(um + vm - &id));
    if complement > LEMMA_TOL {
        return Err(Error::NotComplementary {
            residual: complement,
        });
    }
    let diff = um - vm;
    let sq_diff = um * um - vm * vm;
    let residual = max_abs(&(&diff - &sq_diff));
    let scale = 1.0 + row_sum_norm(um).powi(2);
    Ok(IdentityResult {
        lhs: Complex64::new(max_abs(&diff), 0.0),
        rhs: Complex64::new(max_abs(&sq_diff), 0.0),
        residual,
        scale,
        tol: LEMMA_TOL,
        passed: residual <= LEMMA_TOL * scale,
        path_gap: 0.0,
    })
}

/// Per-frame data shared by every `(M, x)` evaluation: the Gram-type
/// table `G[n][k] = [τ_n, ω_k]` and, when `S` is invertible, `S⁻¹` and the
/// canonical dual.
#[derive(Debug, Clone)]
pub struct FrameContext<'a> {
    frame: &'a Pasf,
    gram: Vec<Vec<Complex64>>,
    parseval_residual: f64,
    inverse: Option<InverseData>,
}

#[derive(Debug, Clone)]
struct InverseData {
    s_inv: DMatrix<Complex64>,
    dual: Pasf,
    // J(ω̃_n)
    dual_omega_j: Vec<Vec<Complex64>>,
}

impl<'a> FrameContext<'a> {
    pub fn new(frame: &'a Pasf) -> Self {
        let p = frame.space().p();
        let omega_j: Vec<Vec<Complex64>> = frame
            .omega()
            .iter()
            .map(|w| dual_coords(w.coords(), p))
            .collect();
        let gram = frame
            .tau()
            .iter()
            .map(|t| omega_j.iter().map(|j| dot(t.coords(), j)).collect())
            .collect();
        let inverse = frame.frame_operator().invert().ok().map(|inv| {
            let dual = frame.canonical_dual().expect("S invertible");
            let dual_omega_j = dual
                .omega()
                .iter()
                .map(|w| dual_coords(w.coords(), p))
                .collect();
            InverseData {
                s_inv: inv.inverse.matrix().clone(),
                dual,
                dual_omega_j,
            }
        });
        Self {
            frame,
            gram,
            parseval_residual: frame.parseval_residual(),
            inverse,
        }
    }

    pub fn frame(&self) -> &Pasf {
        self.frame
    }

    pub fn parseval_residual(&self) -> f64 {
        self.parseval_residual
    }

    /// Canonical dual, when `S` is invertible.
    pub fn canonical_dual(&self) -> Option<&Pasf> {
        self.inverse.as_ref().map(|d| &d.dual)
    }

    fn p(&self) -> f64 {
        self.frame.space().p()
    }

    fn require_parseval(&self) -> Result<()> {
        if self.parseval_residual > PARSEVAL_TOL {
            return Err(Error::NotParseval {
                residual: self.parseval_residual,
            });
        }
        Ok(())
    }

    fn require_inverse(&self) -> Result<&InverseData> {
        self.inverse
            .as_ref()
            .ok_or(Error::NotInvertible { pivot: 0.0 })
    }

    /// `([x, ω_n])_n` and `([τ_n, x])_n`.
    fn coefficients(&self, x: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let a = self.frame.coefficients(x);
        let jx = dual_coords(x, self.p());
        let b = self.frame.tau().iter().map(|t| dot(t.coords(), &jx)).collect();
        (a, b)
    }

    fn partial(&self, indices: &[usize]) -> DMatrix<Complex64> {
        let set = IndexSet::new(self.frame.len(), indices.iter().copied()).expect("in range");
        self.frame
            .partial_frame_operator(&set)
            .expect("same universe")
            .matrix()
            .clone()
    }

    fn check(&self, m: &IndexSet, x: &Vector) -> Result<()> {
        self.frame.check_subset(m)?;
        if x.space().dim() != self.frame.space().dim() {
            return Err(Error::DimensionMismatch {
                expected: self.frame.space().dim(),
                found: x.space().dim(),
            });
        }
        Ok(())
    }

    /// One side of the general identity for the index set `set`:
    /// literal `Σ_{set}[x,ω_n][τ_n,x] - Σ_n [S_A x, ω̃_n][τ̃_n, S_A† x]` and
    /// operator form `[S_A x, x] - [S⁻¹S_A x, S_A† x]`.
    fn general_side(&self, inv: &InverseData, set: &[usize], x: &[Complex64]) -> (Complex64, Complex64) {
        let p = self.p();
        let (a, b) = self.coefficients(x);
        let s_a = self.partial(set);
        let sx = mat_vec(&s_a, x);
        let s_adj_x = adjoint_coords(&s_a, x, p);
        let j_adj = dual_coords(&s_adj_x, p);

        let first: Complex64 = set.iter().map(|&n| a[n] * b[n]).sum();
        let second: Complex64 = inv
            .dual_omega_j
            .iter()
            .zip(inv.dual.tau())
            .map(|(wj, t)| dot(&sx, wj) * dot(t.coords(), &j_adj))
            .sum();
        let literal = first - second;

        let operator = sip_coords(&sx, x, p) - dot(&mat_vec(&inv.s_inv, &sx), &j_adj);
        (literal, operator)
    }

    pub fn general_identity(&self, m: &IndexSet, x: &Vector, tol: f64) -> Result<IdentityResult> {
        self.check(m, x)?;
        let inv = self.require_inverse()?;
        let (lit_m, op_m) = self.general_side(inv, m.members(), x.coords());
        let (lit_c, op_c) = self.general_side(inv, m.complement_members(), x.coords());
        let gap = (lit_m - op_m).norm().max((lit_c - op_c).norm());
        Ok(IdentityResult::scalar(lit_m, lit_c, tol, gap))
    }

    /// `Σ_{set}[x,ω_n][τ_n,x] - Σ_{n,k∈set}[x,ω_n][τ_n,ω_k][τ_k,x]` and its
    /// operator form `[S_A x, x] - [S_A x, S_A† x]`.
    fn parseval_side(&self, set: &[usize], x: &[Complex64]) -> (Complex64, Complex64) {
        let p = self.p();
        let (a, b) = self.coefficients(x);
        let literal = linear_sum(set, &a, &b) - double_sum(set, &a, &self.gram, &b);

        let s_a = self.partial(set);
        let sx = mat_vec(&s_a, x);
        let s_adj_x = adjoint_coords(&s_a, x, p);
        let operator = sip_coords(&sx, x, p) - sip_coords(&sx, &s_adj_x, p);
        (literal, operator)
    }

    pub fn parseval_identity(&self, m: &IndexSet, x: &Vector, tol: f64) -> Result<IdentityResult> {
        self.check(m, x)?;
        self.require_parseval()?;
        let (lit_m, op_m) = self.parseval_side(m.members(), x.coords());
        let (lit_c, op_c) = self.parseval_side(m.complement_members(), x.coords());
        let gap = (lit_m - op_m).norm().max((lit_c - op_c).norm());
        Ok(IdentityResult::scalar(lit_m, lit_c, tol, gap))
    }

    /// Max-entry residual of `S_M + S_{M^c}² - S_{M^c} - S_M²`, also taken
    /// in the rearranged form `S_M - S_M² - (S_{M^c} - S_{M^c}²)`.
    pub fn operator_identity_residual(&self, m: &IndexSet) -> Result<f64> {
        self.frame.check_subset(m)?;
        self.require_parseval()?;
        let s_m = self.partial(m.members());
        let s_c = self.partial(m.complement_members());
        let (sq_m, sq_c) = (&s_m * &s_m, &s_c * &s_c);
        let first = max_abs(&(&s_m + &sq_c - &s_c - &sq_m));
        let second = max_abs(&((&s_m - &sq_m) - (&s_c - &sq_c)));
        Ok(first.max(second))
    }

    pub fn lower_bound(&self, m: &IndexSet, x: &Vector) -> Result<BoundResult> {
        self.check(m, x)?;
        self.require_parseval()?;
        if x.is_zero() {
            return Err(Error::UndefinedRatio);
        }
        Ok(self.bound_evaluator(m).evaluate(x.coords()))
    }

    /// Precomputed data for repeated bound evaluations on one subset.
    pub fn bound_evaluator(&self, m: &IndexSet) -> BoundEvaluator<'_> {
        let d = self.frame.space().dim();
        let s_m = self.partial(m.members());
        let half = DMatrix::<Complex64>::identity(d, d) * Complex64::new(0.5, 0.0);
        let shifted = &s_m - half;
        BoundEvaluator {
            ctx: self,
            members: m.members().to_vec(),
            complement: m.complement_members().to_vec(),
            hypothesis_op: &shifted * &shifted,
        }
    }
}

fn linear_sum(set: &[usize], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    set.iter().map(|&n| a[n] * b[n]).sum()
}

fn double_sum(set: &[usize], a: &[Complex64], gram: &[Vec<Complex64>], b: &[Complex64]) -> Complex64 {
    set.iter()
        .map(|&n| {
            let inner: Complex64 = set.iter().map(|&k| gram[n][k] * b[k]).sum();
            a[n] * inner
        })
        .sum()
}

/// Evaluates `Q(x)`, `h(x)` and the ratio on one fixed subset.
#[derive(Debug, Clone)]
pub struct BoundEvaluator<'a> {
    ctx: &'a FrameContext<'a>,
    members: Vec<usize>,
    complement: Vec<usize>,
    hypothesis_op: DMatrix<Complex64>,
}

impl BoundEvaluator<'_> {
    /// Coordinates must be nonzero.
    pub fn evaluate(&self, x: &[Complex64]) -> BoundResult {
        let p = self.ctx.p();
        let (a, b) = self.ctx.coefficients(x);
        let gram = &self.ctx.gram;
        let q = linear_sum(&self.members, &a, &b) + double_sum(&self.complement, &a, gram, &b);
        let q_sym = linear_sum(&self.complement, &a, &b) + double_sum(&self.members, &a, gram, &b);
        let h = sip_coords(&mat_vec(&self.hypothesis_op, x), x, p);
        let norm_sq = lp_norm(x, p).powi(2);
        BoundResult {
            q_value: q.re,
            q_imag: q.im,
            symmetric_gap: (q - q_sym).norm(),
            hypothesis_value: h.re,
            hypothesis_imag: h.im,
            norm_sq,
            ratio: q.re / norm_sq,
            hypothesis_holds: h.re >= -HYPOTHESIS_SLACK,
        }
    }

    /// `Re Q(x) / ‖x‖²`, or `+∞` at zero.
    pub fn ratio(&self, x: &[Complex64]) -> f64 {
        let (a, b) = self.ctx.coefficients(x);
        let q = linear_sum(&self.members, &a, &b)
            + double_sum(&self.complement, &a, &self.ctx.gram, &b);
        let n = lp_norm(x, self.ctx.p());
        if n == 0.0 {
            f64::INFINITY
        } else {
            q.re / (n * n)
        }
    }

    /// `Re h(x) / ‖x‖²`, or `+∞` at zero.
    pub fn hypothesis_ratio(&self, x: &[Complex64]) -> f64 {
        let p = self.ctx.p();
        let h = sip_coords(&mat_vec(&self.hypothesis_op, x), x, p);
        let n = lp_norm(x, p);
        if n == 0.0 {
            f64::INFINITY
        } else {
            h.re / (n * n)
        }
    }
}

// --- free-function entry points ------------------------------------------

/// Both sides of the general p-ASF identity
/// `Σ_{M}[x,ω_n][τ_n,x] - Σ_n[S_M x,ω̃_n][τ̃_n,S_M† x] = (same with M^c)`.
pub fn general_identity_sides(f: &Pasf, m: &IndexSet, x: &Vector) -> Result<IdentityResult> {
    FrameContext::new(f).general_identity(m, x, DEFAULT_TOL_REL)
}

/// Both sides of the Parseval p-ASF identity
/// `Σ_{M}[x,ω_n][τ_n,x] - Σ_{n,k∈M}[x,ω_n][τ_n,ω_k][τ_k,x] = (same with M^c)`.
pub fn parseval_identity_sides(f: &Pasf, m: &IndexSet, x: &Vector) -> Result<IdentityResult> {
    FrameContext::new(f).parseval_identity(m, x, PARSEVAL_TOL_REL)
}

pub fn operator_identity_residual(f: &Pasf, m: &IndexSet) -> Result<f64> {
    FrameContext::new(f).operator_identity_residual(m)
}

pub fn lower_bound_eval(f: &Pasf, m: &IndexSet, x: &Vector) -> Result<BoundResult> {
    FrameContext::new(f).lower_bound(m, x)
}


// --- Hilbert-space specialisation ----------------------------------------

/// Outcome of [`hilbert_suite`]. Residuals are relative (`residual/scale`).
#[derive(Debug, Clone, Serialize)]
pub struct HilbertReport {
    /// Frame identity on `{τ_n}` with dual `τ̃_n = S⁻¹τ_n`.
    pub frame_identity_max_residual: f64,
    /// Parseval frame identity on the canonical Parseval frame `S^{-1/2}τ_n`.
    pub parseval_identity_max_residual: f64,
    /// `min (Σ_M|⟨h,τ'_n⟩|² + ‖Σ_{M^c}⟨h,τ'_n⟩τ'_n‖²) / ‖h‖²`.
    pub min_ratio: f64,
    pub min_ratio_subset: String,
    /// Largest gap between the bound quantity and its M ↔ M^c form.
    pub bound_symmetry_gap: f64,
    pub cases: usize,
    pub passed: bool,
}

/// Frame-identity tolerance for the Hilbert suite.
pub const HILBERT_TOL_REL: f64 = 1e-8;

/// Checks the classical Hilbert-space frame identity, Parseval frame
/// identity and 3/4 bound for the frame `{τ_n}` of a p = 2 frame file,
/// using ordinary inner products throughout.
///
/// Subsets are exhaustive for `N ≤ 8` and 100 random ones otherwise; each
/// subset is paired with `trials` random `h`.
pub fn hilbert_suite(f: &Pasf, trials: usize, seed: u64) -> Result<HilbertReport> {
    let space = *f.space();
    if !space.is_hilbert() {
        return Err(Error::NotHilbert(space.p()));
    }
    let (d, n) = (space.dim(), f.len());
    let t = DMatrix::from_fn(d, n, |i, j| f.tau()[j].coords()[i]);
    let s = &t * t.adjoint();
    let s_op = LinearOperator::on(space, s.clone())?;
    let s_inv = s_op.invert()?.inverse.matrix().clone();
    let dual = &s_inv * &t;
    let eig = s.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig.is_nan() || min_eig <= 0.0 {
        return Err(Error::NotInvertible { pivot: min_eig });
    }
    let inv_sqrt_diag = DMatrix::from_diagonal(
        &eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)),
    );
    let inv_sqrt = &eig.eigenvectors * inv_sqrt_diag * eig.eigenvectors.adjoint();
    let parseval = &inv_sqrt * &t;

    let inner = |h: &[Complex64], col: &[Complex64]| -> Complex64 {
        h.iter().zip(col).map(|(a, b)| a * b.conj()).sum()
    };
    let columns = |m: &DMatrix<Complex64>| -> Vec<Vec<Complex64>> {
        (0..n).map(|k| m.column(k).iter().copied().collect()).collect()
    };
    let (t_cols, dual_cols, parseval_cols) = (columns(&t), columns(&dual), columns(&parseval));
    let synth = |frame: &DMatrix<Complex64>, coef: &[Complex64], set: &[usize]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for &k in set {
            for i in 0..d {
                out[i] += coef[k] * frame[(i, k)];
            }
        }
        out
    };
    let norm_sq = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();

    let policy_sets = if n <= 8 {
        crate::frames::all_subsets(n).collect::<Vec<_>>()
    } else {
        let mut rng = crate::rng::stream_rng(seed, crate::rng::stream_id(&[0x4117, n as u64]));
        crate::frames::random_subsets(&mut rng, n, 100)
    };

    let mut report = HilbertReport {
        frame_identity_max_residual: 0.0,
        parseval_identity_max_residual: 0.0,
        min_ratio: f64::INFINITY,
        min_ratio_subset: String::new(),
        bound_symmetry_gap: 0.0,
        cases: 0,
        passed: true,
    };
    for m in &policy_sets {
        let mut rng = crate::rng::stream_rng(seed, crate::rng::stream_id(&[0x4118, m.mask()]));
        let (mem, comp) = (m.members(), m.complement_members());
        for _ in 0..trials {
            let h = crate::rng::random_nonzero_vector(&mut rng, &space);
            let h = h.coords();
            let hh = norm_sq(h);

            let c: Vec<Complex64> = (0..n).map(|k| inner(h, &t_cols[k])).collect();
            let frame_side = |set: &[usize]| {
                let sh = synth(&t, &c, set);
                let first: f64 = set.iter().map(|&k| c[k].norm_sqr()).sum();
                let second: f64 = (0..n).map(|k| inner(&sh, &dual_cols[k]).norm_sqr()).sum();
                first - second
            };
            let (l, r) = (frame_side(mem), frame_side(comp));
            let rel = (l - r).abs() / 1f64.max(l.abs()).max(r.abs());
            report.frame_identity_max_residual = report.frame_identity_max_residual.max(rel);

            let cp: Vec<Complex64> = (0..n).map(|k| inner(h, &parseval_cols[k])).collect();
            let energy = |set: &[usize]| set.iter().map(|&k| cp[k].norm_sqr()).sum::<f64>();
            let synth_sq = |set: &[usize]| norm_sq(&synth(&parseval, &cp, set));
            let (l, r) = (energy(mem) - synth_sq(mem), energy(comp) - synth_sq(comp));
            let rel = (l - r).abs() / 1f64.max(l.abs()).max(r.abs());
            report.parseval_identity_max_residual = report.parseval_identity_max_residual.max(rel);

            let q = energy(mem) + synth_sq(comp);
            let q_sym = energy(comp) + synth_sq(mem);
            report.bound_symmetry_gap = report
                .bound_symmetry_gap
                .max((q - q_sym).abs() / 1f64.max(q.abs()));
            let ratio = q / hh;
            if ratio < report.min_ratio {
                report.min_ratio = ratio;
                report.min_ratio_subset = m.bitstring();
            }
            report.cases += 1;
        }
    }
    report.passed = report.frame_identity_max_residual <= HILBERT_TOL_REL
        && report.parseval_identity_max_residual <= HILBERT_TOL_REL
        && report.bound_symmetry_gap <= HILBERT_TOL_REL
        && report.min_ratio >= 0.75 - HILBERT_TOL_REL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{all_subsets, duplicated_extremal_frame, random_pasf};
    use crate::rng::{random_coords, random_nonzero_vector, stream_rng};
    use crate::sip::{Field, SipSpace};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lemma_examples() {
        let s = SipSpace::new(3, 2.0, Field::Real).unwrap();
        let id = LinearOperator::identity(s);
        let half = id.scale(c(0.5));
        let r = lemma_uv_check(&half, &half).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.passed);
        let r = lemma_uv_check(&id, &LinearOperator::zeros(s, s)).unwrap();
        assert!(r.passed && r.residual == 0.0);

        let s8 = SipSpace::new(8, 2.0, Field::Complex).unwrap();
        let mut rng = stream_rng(3, 0);
        let u = LinearOperator::on(
            s8,
            DMatrix::from_vec(8, 8, random_coords(&mut rng, Field::Complex, 64)),
        )
        .unwrap();
        let v = LinearOperator::identity(s8).sub(&u).unwrap();
        let r = lemma_uv_check(&u, &v).unwrap();
        assert!(r.residual <= 1e-12 * r.scale, "{r:?}");
        assert!(matches!(
            lemma_uv_check(&u, &u),
            Err(Error::NotComplementary { .. })
        ));
    }

    #[test]
    fn general_identity_at_zero_and_full_set() {
        let s = SipSpace::new(3, 3.0, Field::Complex).unwrap();
        let f = random_pasf(s, 5, 2, false).unwrap();
        let r = general_identity_sides(&f, &IndexSet::new(5, [1, 3]).unwrap(), &s.zero()).unwrap();
        assert_eq!(r.lhs, c(0.0));
        assert_eq!(r.rhs, c(0.0));

        let mut rng = stream_rng(4, 0);
        let x = random_nonzero_vector(&mut rng, &s);
        let r = general_identity_sides(&f, &IndexSet::full(5), &x).unwrap();
        assert_eq!(r.rhs, c(0.0));
        assert!(r.passed, "{r:?}");
        assert!(r.path_gap < 1e-9);
    }

    #[test]
    fn general_identity_swaps_under_complement() {
        let s = SipSpace::new(2, 1.5, Field::Real).unwrap();
        let f = random_pasf(s, 4, 5, false).unwrap();
        let mut rng = stream_rng(6, 0);
        let x = random_nonzero_vector(&mut rng, &s);
        let m = IndexSet::new(4, [0, 3]).unwrap();
        let a = general_identity_sides(&f, &m, &x).unwrap();
        let b = general_identity_sides(&f, &m.complement(), &x).unwrap();
        assert_eq!(a.lhs, b.rhs);
        assert_eq!(a.rhs, b.lhs);
        assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn parseval_identity_extremal_frame() {
        let f = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        let x = f.space().real_vector(&[1.0]).unwrap();
        let r = parseval_identity_sides(&f, &IndexSet::new(2, [0]).unwrap(), &x).unwrap();
        assert!((r.lhs - c(0.25)).norm() < 1e-15);
        assert!((r.rhs - c(0.25)).norm() < 1e-15);
        let zero = parseval_identity_sides(&f, &IndexSet::new(2, [0]).unwrap(), &f.space().zero())
            .unwrap();
        assert_eq!(zero.lhs, c(0.0));
    }

    #[test]
    fn parseval_identity_rejects_non_parseval() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let f = crate::frames::Pasf::standard_basis(s).scale_tau(c(2.0));
        let x = s.real_vector(&[1.0, 1.0]).unwrap();
        let m = IndexSet::new(2, [0]).unwrap();
        assert!(matches!(
            parseval_identity_sides(&f, &m, &x),
            Err(Error::NotParseval { .. })
        ));
        assert!(matches!(
            operator_identity_residual(&f, &m),
            Err(Error::NotParseval { .. })
        ));
        assert!(matches!(lower_bound_eval(&f, &m, &x), Err(Error::NotParseval { .. })));
    }

    #[test]
    fn operator_identity_standard_basis_is_exact() {
        let s = SipSpace::new(4, 3.0, Field::Real).unwrap();
        let f = crate::frames::Pasf::standard_basis(s);
        for m in all_subsets(4) {
            assert_eq!(operator_identity_residual(&f, &m).unwrap(), 0.0);
        }
    }

    #[test]
    fn lower_bound_extremal_and_full() {
        let f = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        let x = f.space().real_vector(&[1.0]).unwrap();
        let b = lower_bound_eval(&f, &IndexSet::new(2, [0]).unwrap(), &x).unwrap();
        assert!((b.q_value - 0.75).abs() < 1e-15);
        assert!((b.ratio - 0.75).abs() < 1e-15);
        assert!(b.hypothesis_holds);

        let s = SipSpace::new(3, 3.0, Field::Complex).unwrap();
        let g = random_pasf(s, 5, 1, true).unwrap();
        let mut rng = stream_rng(9, 0);
        let x = random_nonzero_vector(&mut rng, &s);
        let b = lower_bound_eval(&g, &IndexSet::full(5), &x).unwrap();
        assert!((b.ratio - 1.0).abs() < 1e-8);
        assert!(matches!(
            lower_bound_eval(&g, &IndexSet::full(5), &s.zero()),
            Err(Error::UndefinedRatio)
        ));
    }

    #[test]
    fn lower_bound_scale_invariance() {
        let s = SipSpace::new(3, 1.5, Field::Complex).unwrap();
        let g = random_pasf(s, 5, 3, true).unwrap();
        let m = IndexSet::new(5, [0, 2]).unwrap();
        let mut rng = stream_rng(2, 0);
        let x = random_nonzero_vector(&mut rng, &s);
        let base = lower_bound_eval(&g, &m, &x).unwrap().ratio;
        for lambda in [c(3.0), Complex64::new(-0.2, 0.7)] {
            let r = lower_bound_eval(&g, &m, &x.scale(lambda)).unwrap().ratio;
            assert!((r - base).abs() <= 1e-9 * base.abs().max(1.0));
        }
    }

    #[test]
    fn hilbert_suite_examples() {
        let f = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        let r = hilbert_suite(&f, 5, 1).unwrap();
        assert!((r.min_ratio - 0.75).abs() < 1e-10, "{r:?}");
        assert!(r.passed);

        let s = SipSpace::new(3, 2.0, Field::Complex).unwrap();
        let g = random_pasf(s, 5, 4, false).unwrap();
        let r = hilbert_suite(&g, 3, 2).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.cases, 32 * 3);

        let g3 = random_pasf(SipSpace::new(2, 3.0, Field::Real).unwrap(), 3, 1, false).unwrap();
        assert!(matches!(hilbert_suite(&g3, 1, 1), Err(Error::NotHilbert(_))));
    }
}
