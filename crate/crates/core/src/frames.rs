//! p-approximate Schauder frames.
//!
//! A [`Pasf`] stores the functionals `f_n` by their representers `ω_n`
//! (`f_n(x) = [x, ω_n]`) together with the synthesis vectors `τ_n`. Because
//! the semi-inner product is linear in its first slot, the analysis map is
//! the matrix whose n-th row is `J(ω_n)`, and the frame operator is
//! `S = Σ_n τ_n J(ω_n)ᵀ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{
    adjoint_coords, mat_vec, max_abs, pnorm_estimate, LinearOperator, NormEstimate,
    DEFAULT_RESTARTS,
};
use crate::rng::{random_coords, stream_id, stream_rng};
use crate::sip::{dot, dual_coords, Field, SipSpace, Vector};

/// Retry budget for [`random_pasf`] beyond the first attempt.
pub const GENERATION_RETRIES: usize = 20;

/// Largest `|S - I|` entry for a frame to count as Parseval.
pub const PARSEVAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Pasf {
    space: SipSpace,
    omega: Vec<Vector>,
    tau: Vec<Vector>,
    // J(ω_n), cached: row n of the analysis matrix.
    omega_dual: Vec<Vec<Complex64>>,
}

impl Pasf {
    pub fn new(space: SipSpace, omega: Vec<Vector>, tau: Vec<Vector>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if omega.len() != tau.len() {
            return Err(Error::DimensionMismatch {
                expected: omega.len(),
                found: tau.len(),
            });
        }
        for v in omega.iter().chain(&tau) {
            if v.space().dim() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: v.space().dim(),
                });
            }
            if *v.space() != space {
                return Err(Error::SpaceMismatch);
            }
        }
        let omega_dual = omega
            .iter()
            .map(|w| dual_coords(w.coords(), space.p()))
            .collect();
        Ok(Self {
            space,
            omega,
            tau,
            omega_dual,
        })
    }

    /// `ω_n = τ_n = e_n`, `N = dim`.
    pub fn standard_basis(space: SipSpace) -> Self {
        let basis: Vec<Vector> = (0..space.dim())
            .map(|k| space.basis(k).expect("in range"))
            .collect();
        Self::new(space, basis.clone(), basis).expect("valid")
    }

    pub fn space(&self) -> &SipSpace {
        &self.space
    }

    /// Number of frame elements N.
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[Vector] {
        &self.omega
    }

    pub fn tau(&self) -> &[Vector] {
        &self.tau
    }

    /// ℓ^p over the N coefficient slots.
    pub fn coefficient_space(&self) -> SipSpace {
        self.space.with_dim(self.len()).expect("N >= 1")
    }

    /// `([x, ω_n])_n`.
    pub fn analysis_apply(&self, x: &Vector) -> Result<Vector> {
        self.check_member(x)?;
        Ok(Vector::from_trusted(
            self.coefficient_space(),
            self.coefficients(x.coords()),
        ))
    }

    pub(crate) fn coefficients(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.omega_dual.iter().map(|j| dot(x, j)).collect()
    }

    /// `Σ a_n τ_n`.
    pub fn synthesis_apply(&self, a: &Vector) -> Result<Vector> {
        if a.space().dim() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: a.space().dim(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.space.dim()];
        for (coef, t) in a.coords().iter().zip(&self.tau) {
            for (o, ti) in out.iter_mut().zip(t.coords()) {
                *o += coef * ti;
            }
        }
        Ok(Vector::from_trusted(self.space, out))
    }

    pub fn analysis_operator(&self) -> LinearOperator {
        let (n, d) = (self.len(), self.space.dim());
        let m = DMatrix::from_fn(n, d, |i, j| self.omega_dual[i][j]);
        LinearOperator::from_trusted(m, self.space, self.coefficient_space())
    }

    pub fn synthesis_operator(&self) -> LinearOperator {
        let (n, d) = (self.len(), self.space.dim());
        let m = DMatrix::from_fn(d, n, |i, j| self.tau[j].coords()[i]);
        LinearOperator::from_trusted(m, self.coefficient_space(), self.space)
    }

    /// `S x = Σ_n [x, ω_n] τ_n`.
    pub fn frame_operator(&self) -> LinearOperator {
        self.partial_matrix(0..self.len())
    }

    /// `S_M x = Σ_{n ∈ M} [x, ω_n] τ_n`.
    pub fn partial_frame_operator(&self, m: &IndexSet) -> Result<LinearOperator> {
        self.check_subset(m)?;
        Ok(self.partial_matrix(m.iter()))
    }

    fn partial_matrix(&self, indices: impl Iterator<Item = usize>) -> LinearOperator {
        let d = self.space.dim();
        let mut s = DMatrix::<Complex64>::zeros(d, d);
        for n in indices {
            let t = self.tau[n].coords();
            let j = &self.omega_dual[n];
            for r in 0..d {
                for c in 0..d {
                    s[(r, c)] += t[r] * j[c];
                }
            }
        }
        LinearOperator::from_trusted(s, self.space, self.space)
    }

    /// Max-entry `|S - I|`.
    pub fn parseval_residual(&self) -> f64 {
        let d = self.space.dim();
        max_abs(&(self.frame_operator().matrix() - DMatrix::<Complex64>::identity(d, d)))
    }

    pub fn is_parseval(&self) -> bool {
        self.parseval_residual() <= PARSEVAL_TOL
    }

    /// `S` is invertible with condition estimate within [`CONDITION_LIMIT`](crate::operators::CONDITION_LIMIT).
    pub fn is_certified(&self) -> bool {
        matches!(self.frame_operator().invert(), Ok(inv) if inv.is_well_conditioned())
    }

    /// Frame constants, conditioning and Parseval residual.
    pub fn certify(&self, restarts: usize, seed: u64) -> Result<FrameReport> {
        let p = self.space.p();
        let c = pnorm_estimate(
            &self.analysis_operator(),
            p,
            p,
            restarts,
            stream_id(&[seed, 1]),
        )?;
        let d = pnorm_estimate(
            &self.synthesis_operator(),
            p,
            p,
            restarts,
            stream_id(&[seed, 2]),
        )?;
        let s = self.frame_operator();
        let (condition_s, certified) = match s.invert() {
            Ok(inv) => (Some(inv.condition), inv.is_well_conditioned()),
            Err(Error::NotInvertible { .. }) => (None, false),
            Err(e) => return Err(e),
        };
        let (a_estimate, b_estimate) = if self.space.is_hilbert() {
            let (lo, hi) = hermitian_extremes(s.matrix());
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        Ok(FrameReport {
            p,
            dim: self.space.dim(),
            n: self.len(),
            c_estimate: c.lower_bound,
            c_witness: c,
            d_estimate: d.lower_bound,
            d_witness: d,
            a_estimate,
            b_estimate,
            condition_s,
            parseval_residual: self.parseval_residual(),
            certified,
        })
    }

    /// `ω̃_n = (S⁻¹)†ω_n`, `τ̃_n = S⁻¹τ_n`; its frame operator is `S⁻¹`.
    pub fn canonical_dual(&self) -> Result<Pasf> {
        let inv = self.frame_operator().invert()?.inverse;
        let p = self.space.p();
        let omega = self
            .omega
            .iter()
            .map(|w| Vector::from_trusted(self.space, adjoint_coords(inv.matrix(), w.coords(), p)))
            .collect();
        let tau = self
            .tau
            .iter()
            .map(|t| Vector::from_trusted(self.space, mat_vec(inv.matrix(), t.coords())))
            .collect();
        Pasf::new(self.space, omega, tau)
    }

    /// Replaces `τ_n` by `S⁻¹τ_n`, which makes the frame operator `I`.
    pub fn parsevalize(&self) -> Result<Pasf> {
        let inv = self.frame_operator().invert()?.inverse;
        let tau = self
            .tau
            .iter()
            .map(|t| Vector::from_trusted(self.space, mat_vec(inv.matrix(), t.coords())))
            .collect();
        Pasf::new(self.space, self.omega.clone(), tau)
    }

    /// New pair with every `τ_n` multiplied by `lambda`.
    pub fn scale_tau(&self, lambda: Complex64) -> Pasf {
        let tau = self.tau.iter().map(|t| t.scale(lambda)).collect();
        Pasf::new(self.space, self.omega.clone(), tau).expect("same shape")
    }

    fn check_member(&self, x: &Vector) -> Result<()> {
        if x.space().dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: x.space().dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_subset(&self, m: &IndexSet) -> Result<()> {
        if m.universe() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: m.universe(),
            });
        }
        Ok(())
    }
}

/// Extreme eigenvalues of the Hermitian part `(S + Sᴴ)/2`. For `ω = τ`
/// frames at p = 2 these are the optimal frame bounds.
fn hermitian_extremes(s: &DMatrix<Complex64>) -> (f64, f64) {
    let h = (s + s.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Summary produced by [`Pasf::certify`].
#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub p: f64,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Best-found constant c with `‖θ_f x‖_p ≤ c‖x‖`.
    pub c_estimate: f64,
    pub c_witness: NormEstimate,
    /// Best-found constant d with `‖θ_τ a‖ ≤ d‖a‖_p`.
    pub d_estimate: f64,
    pub d_witness: NormEstimate,
    /// Lower frame bound, p = 2 only.
    pub a_estimate: Option<f64>,
    /// Upper frame bound, p = 2 only.
    pub b_estimate: Option<f64>,
    /// `None` when S is singular.
    pub condition_s: Option<f64>,
    pub parseval_residual: f64,
    pub certified: bool,
}

/// A subset M of the frame indices `{0, …, N-1}` together with its
/// complement. Iteration is ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    universe: usize,
    members: Vec<usize>,
    complement: Vec<usize>,
}

impl IndexSet {
    pub fn new(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut in_set = vec![false; universe];
        for i in members {
            if i >= universe {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: universe,
                });
            }
            in_set[i] = true;
        }
        Ok(Self::from_flags(&in_set))
    }

    fn from_flags(in_set: &[bool]) -> Self {
        let (members, complement): (Vec<usize>, Vec<usize>) =
            (0..in_set.len()).partition(|&i| in_set[i]);
        Self {
            universe: in_set.len(),
            members,
            complement,
        }
    }

    pub fn empty(universe: usize) -> Self {
        Self::from_flags(&vec![false; universe])
    }

    pub fn full(universe: usize) -> Self {
        Self::from_flags(&vec![true; universe])
    }

    /// Bit k of `mask` selects index k. Requires `universe ≤ 64`.
    pub fn from_mask(universe: usize, mask: u64) -> Result<Self> {
        if universe > 64 || (universe < 64 && mask >> universe != 0) {
            return Err(Error::IndexOutOfRange {
                index: 64 - mask.leading_zeros() as usize,
                size: universe,
            });
        }
        let flags: Vec<bool> = (0..universe).map(|k| mask >> k & 1 == 1).collect();
        Ok(Self::from_flags(&flags))
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    /// `'1'`/`'0'` per index, index 0 first.
    pub fn bitstring(&self) -> String {
        let mut s = vec!['0'; self.universe];
        for &i in &self.members {
            s[i] = '1';
        }
        s.into_iter().collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let flags = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Format(format!("bad subset bitstring {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_flags(&flags))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement_members(&self) -> &[usize] {
        &self.complement
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet {
            universe: self.universe,
            members: self.complement.clone(),
            complement: self.members.clone(),
        }
    }
}

/// All `2^universe` subsets in ascending bitmask order.
pub fn all_subsets(universe: usize) -> impl Iterator<Item = IndexSet> {
    assert!(universe < 64, "exhaustive enumeration needs universe < 64");
    (0..1u64 << universe).map(move |m| IndexSet::from_mask(universe, m).expect("in range"))
}

/// `count` subsets, each index included independently with probability ½.
pub fn random_subsets<R: Rng + ?Sized>(rng: &mut R, universe: usize, count: usize) -> Vec<IndexSet> {
    (0..count)
        .map(|_| {
            let flags: Vec<bool> = (0..universe).map(|_| rng.random_bool(0.5)).collect();
            IndexSet::from_flags(&flags)
        })
        .collect()
}

/// Random certified p-ASF with `n` elements.
///
/// Entries are i.i.d. uniform on [-1, 1]; attempt k draws from stream k of
/// `seed`. With `parseval`, the frame is made Parseval: at p = 2 via
/// `ω_n = τ_n = conj(row n of Q)` for a random `Q` with orthonormal columns,
/// otherwise by [`Pasf::parsevalize`].
pub fn random_pasf(space: SipSpace, n: usize, seed: u64, parseval: bool) -> Result<Pasf> {
    if n == 0 {
        return Err(Error::EmptyFrame);
    }
    for attempt in 0..=GENERATION_RETRIES {
        let mut rng = stream_rng(seed, attempt as u64);
        let candidate = if parseval && space.is_hilbert() {
            orthonormal_rows_frame(space, n, &mut rng)
        } else {
            let mut draw = || {
                (0..n)
                    .map(|_| {
                        Vector::from_trusted(
                            space,
                            random_coords(&mut rng, space.field(), space.dim()),
                        )
                    })
                    .collect::<Vec<_>>()
            };
            let omega = draw();
            let tau = draw();
            let f = Pasf::new(space, omega, tau)?;
            if parseval {
                f.parsevalize().ok()
            } else {
                Some(f)
            }
        };
        if let Some(f) = candidate {
            if f.is_certified() && (!parseval || f.is_parseval()) {
                return Ok(f);
            }
        }
    }
    Err(Error::GenerationFailed {
        attempts: GENERATION_RETRIES + 1,
    })
}

fn orthonormal_rows_frame<R: Rng + ?Sized>(space: SipSpace, n: usize, rng: &mut R) -> Option<Pasf> {
    let d = space.dim();
    if n < d {
        return None;
    }
    // Columns of an n×d matrix, orthonormalised by two passes of
    // modified Gram–Schmidt.
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| random_coords(rng, space.field(), n))
        .collect();
    for j in 0..d {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let qk = cols[k].clone();
                for (c, q) in cols[j].iter_mut().zip(&qk) {
                    *c -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for c in cols[j].iter_mut() {
            *c /= norm;
        }
    }
    let rows: Vec<Vector> = (0..n)
        .map(|i| Vector::from_trusted(space, (0..d).map(|j| cols[j][i].conj()).collect()))
        .collect();
    Pasf::new(space, rows.clone(), rows).ok()
}

/// Default restart count for [`Pasf::certify`].
pub const CERTIFY_RESTARTS: usize = DEFAULT_RESTARTS;

/// The one-dimensional Parseval pair `ω = τ = (1/√2, 1/√2)`, on which
/// `M = {0}` attains the 3/4 lower bound.
pub fn duplicated_extremal_frame(p: f64, field: Field) -> Result<Pasf> {
    let space = SipSpace::new(1, p, field)?;
    let v = space.real_vector(&[std::f64::consts::FRAC_1_SQRT_2])?;
    Pasf::new(space, vec![v.clone(), v.clone()], vec![v.clone(), v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_vector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn analysis_of_standard_basis_returns_coordinates() {
        for p in [1.5, 2.0, 3.0] {
            let s = SipSpace::new(3, p, Field::Complex).unwrap();
            let f = Pasf::standard_basis(s);
            let mut rng = stream_rng(1, 0);
            let x = random_vector(&mut rng, &s);
            let a = f.analysis_apply(&x).unwrap();
            assert_eq!(a.coords(), x.coords());
            assert!(f.analysis_apply(&s.zero()).unwrap().is_zero());
            assert_eq!(f.synthesis_apply(&a).unwrap().coords(), x.coords());
        }
    }

    #[test]
    fn analysis_scalar_space() {
        let s = SipSpace::new(1, 3.0, Field::Real).unwrap();
        let w = s.real_vector(&[2.0]).unwrap();
        let f = Pasf::new(s, vec![w.clone()], vec![w]).unwrap();
        let a = f.analysis_apply(&s.real_vector(&[5.0]).unwrap()).unwrap();
        assert!((a.coords()[0] - c(10.0)).norm() < 1e-14);
    }

    #[test]
    fn synthesis_examples() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let mut rng = stream_rng(2, 0);
        let f = random_pasf(s, 4, 3, false).unwrap();
        let cs = f.coefficient_space();
        for k in 0..4 {
            let e = cs.basis(k).unwrap();
            assert_eq!(f.synthesis_apply(&e).unwrap(), f.tau()[k]);
        }
        assert!(f.synthesis_apply(&cs.zero()).unwrap().is_zero());
        let bad = random_vector(&mut rng, &s);
        assert!(f.synthesis_apply(&bad).is_err());
    }

    #[test]
    fn frame_operator_examples() {
        let s = SipSpace::new(3, 1.5, Field::Real).unwrap();
        let f = Pasf::standard_basis(s);
        assert_eq!(f.frame_operator().matrix(), &DMatrix::identity(3, 3));

        let ex = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        assert!((ex.frame_operator().matrix()[(0, 0)] - c(1.0)).norm() < 1e-15);

        let g = random_pasf(SipSpace::new(3, 3.0, Field::Complex).unwrap(), 5, 4, false).unwrap();
        let s1 = g.frame_operator();
        let s2 = g.scale_tau(c(2.0)).frame_operator();
        assert!(max_diff(&(s1.matrix() * c(2.0)), s2.matrix()) < 1e-12);

        let composed = g.synthesis_operator().compose(&g.analysis_operator()).unwrap();
        assert!(max_diff(composed.matrix(), s1.matrix()) < 1e-12);
    }

    #[test]
    fn partial_frame_operator_examples() {
        let s = SipSpace::new(4, 3.0, Field::Real).unwrap();
        let f = Pasf::standard_basis(s);
        let m = IndexSet::new(4, [0, 2]).unwrap();
        let sm = f.partial_frame_operator(&m).unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0),
            c(0.0),
            c(1.0),
            c(0.0),
        ]));
        assert_eq!(sm.matrix(), &expect);
        assert_eq!(
            f.partial_frame_operator(&IndexSet::full(4)).unwrap(),
            f.frame_operator()
        );
        assert!(f.partial_frame_operator(&IndexSet::empty(4)).unwrap().max_abs() == 0.0);
        assert!(f.partial_frame_operator(&IndexSet::empty(5)).is_err());

        let g = random_pasf(SipSpace::new(3, 1.5, Field::Complex).unwrap(), 6, 8, false).unwrap();
        for m in all_subsets(6) {
            let sum = g
                .partial_frame_operator(&m)
                .unwrap()
                .add(&g.partial_frame_operator(&m.complement()).unwrap())
                .unwrap();
            assert!(max_diff(sum.matrix(), g.frame_operator().matrix()) < 1e-12);
        }
    }

    #[test]
    fn certify_standard_basis() {
        for p in [1.5, 2.0, 4.0] {
            let s = SipSpace::new(3, p, Field::Real).unwrap();
            let r = Pasf::standard_basis(s).certify(4, 1).unwrap();
            assert_eq!(r.c_estimate, 1.0);
            assert_eq!(r.d_estimate, 1.0);
            assert!(r.parseval_residual <= 1e-12);
            assert!(r.certified);
        }
    }

    #[test]
    fn certify_frame_bounds_bracket_sampled_energy() {
        let s = SipSpace::new(3, 2.0, Field::Complex).unwrap();
        let mut rng = stream_rng(5, 0);
        let draw: Vec<Vector> = (0..6).map(|_| random_vector(&mut rng, &s)).collect();
        let f = Pasf::new(s, draw.clone(), draw).unwrap();
        let r = f.certify(8, 2).unwrap();
        let (a, b) = (r.a_estimate.unwrap(), r.b_estimate.unwrap());
        assert!(0.0 < a && a <= b);
        for _ in 0..100 {
            let h = random_vector(&mut rng, &s);
            let energy: f64 = f.analysis_apply(&h).unwrap().coords().iter().map(|z| z.norm_sqr()).sum();
            let n2 = h.norm().powi(2);
            assert!(a * n2 <= energy * (1.0 + 1e-12) && energy <= b * n2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn certify_zero_tau_is_not_certified() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let f = Pasf::standard_basis(s).scale_tau(c(0.0));
        let r = f.certify(2, 1).unwrap();
        assert!(!r.certified);
        assert!(r.condition_s.is_none());
        assert!(matches!(f.canonical_dual(), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn canonical_dual_examples() {
        let h = SipSpace::new(3, 2.0, Field::Complex).unwrap();
        let f = random_pasf(h, 5, 1, true).unwrap();
        let dual = f.canonical_dual().unwrap();
        for (a, b) in dual.omega().iter().zip(f.omega()) {
            assert!(a.max_abs_diff(b) < 1e-9);
        }
        for (a, b) in dual.tau().iter().zip(f.tau()) {
            assert!(a.max_abs_diff(b) < 1e-9);
        }

        let s = SipSpace::new(3, 3.0, Field::Real).unwrap();
        let f = Pasf::standard_basis(s).scale_tau(c(2.0));
        let dual = f.canonical_dual().unwrap();
        let expect = DMatrix::<Complex64>::identity(3, 3) * c(0.5);
        assert!(max_diff(dual.frame_operator().matrix(), &expect) < 1e-14);

        let g = random_pasf(SipSpace::new(3, 3.0, Field::Complex).unwrap(), 6, 9, false).unwrap();
        let prod = dual_product(&g);
        assert!(max_diff(&prod, &DMatrix::identity(3, 3)) < 1e-7);
    }

    fn dual_product(f: &Pasf) -> DMatrix<Complex64> {
        f.canonical_dual().unwrap().frame_operator().matrix() * f.frame_operator().matrix()
    }

    #[test]
    fn parsevalize_examples() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let f = Pasf::standard_basis(s).scale_tau(c(3.0));
        let p = f.parsevalize().unwrap();
        for (t, e) in p.tau().iter().zip(Pasf::standard_basis(s).tau()) {
            assert!(t.max_abs_diff(e) < 1e-15);
        }
        let again = p.parsevalize().unwrap();
        for (a, b) in again.tau().iter().zip(p.tau()) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
        for pp in [1.5, 2.0, 3.0] {
            let g = random_pasf(SipSpace::new(3, pp, Field::Complex).unwrap(), 5, 2, false).unwrap();
            assert!(g.parsevalize().unwrap().parseval_residual() <= 1e-9);
        }
    }

    #[test]
    fn random_pasf_contract() {
        let h = SipSpace::new(3, 2.0, Field::Real).unwrap();
        let f = random_pasf(h, 5, 7, true).unwrap();
        assert!(f.parseval_residual() <= 1e-10);
        assert!(f.certify(4, 1).unwrap().certified);
        assert_eq!(f, random_pasf(h, 5, 7, true).unwrap());
        assert_ne!(f, random_pasf(h, 5, 8, true).unwrap());

        // Fewer vectors than dimensions cannot span.
        assert!(matches!(
            random_pasf(SipSpace::new(3, 3.0, Field::Real).unwrap(), 2, 1, false),
            Err(Error::GenerationFailed { .. })
        ));
    }

    #[test]
    fn index_set_basics() {
        let m = IndexSet::new(5, [3, 1, 3]).unwrap();
        assert_eq!(m.members(), &[1, 3]);
        assert_eq!(m.complement().members(), &[0, 2, 4]);
        assert_eq!(m.complement().complement(), m);
        assert_eq!(m.mask(), 0b01010);
        assert_eq!(m.bitstring(), "01010");
        assert_eq!(IndexSet::from_bitstring("01010").unwrap(), m);
        assert_eq!(IndexSet::from_mask(5, 0b01010).unwrap(), m);
        assert!(IndexSet::new(5, [5]).is_err());
        assert!(IndexSet::from_mask(3, 0b1000).is_err());
        assert_eq!(all_subsets(4).count(), 16);
        assert_eq!(all_subsets(3).map(|s| s.mask()).collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());
    }
}
