//! Finite-dimensional ℓ^p spaces with the Lumer–Giles semi-inner product.
//!
//! For `y ≠ 0` the semi-inner product is
//!
//! ```text
//! [x, y] = Σ x_n · conj(y_n) · |y_n|^(p-2) / ‖y‖_p^(p-2)
//! ```
//!
//! and `[x, 0] = 0`. It is linear in the first slot, conjugate-homogeneous
//! (but not additive) in the second, and `[x, x] = ‖x‖_p²`.
//!
//! All kernels evaluate the weights as `(|y_n| / ‖y‖_p)^(p-2)` so that large
//! exponents do not overflow, and treat `0 · |0|^(p-2)` as `0` for every
//! `p > 1`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{random_scalar, random_vector, stream_rng};

pub const MIN_EXPONENT: f64 = 1.0 + 1e-6;
pub const MAX_EXPONENT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

/// ℓ^p over `dim` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SipSpace {
    dim: usize,
    p: f64,
    field: Field,
}

impl SipSpace {
    pub fn new(dim: usize, p: f64, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !p.is_finite() || !(MIN_EXPONENT..=MAX_EXPONENT).contains(&p) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self { dim, p, field })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// q = p / (p - 1).
    pub fn conjugate_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    /// Same exponent and field, different dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(dim, self.p, self.field)
    }

    /// `|·|^(p-2)` loses accuracy quickly outside roughly [1.1, 16].
    pub fn conditioning_warning(&self) -> Option<String> {
        if self.p < 1.1 || self.p > 16.0 {
            Some(format!(
                "p = {} is poorly conditioned; |y_n|^(p-2) weights may lose accuracy",
                self.p
            ))
        } else {
            None
        }
    }

    pub fn zero(&self) -> Vector {
        Vector::from_trusted(*self, vec![Complex64::new(0.0, 0.0); self.dim])
    }

    /// Standard basis vector e_k (0-based).
    pub fn basis(&self, k: usize) -> Result<Vector> {
        if k >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: k,
                size: self.dim,
            });
        }
        let mut v = self.zero();
        v.coords[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vector(&self, coords: Vec<Complex64>) -> Result<Vector> {
        Vector::new(*self, coords)
    }

    pub fn real_vector(&self, coords: &[f64]) -> Result<Vector> {
        Vector::new(*self, coords.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn dual_vector(&self, coords: Vec<Complex64>) -> Result<DualVector> {
        check_coords(self, &coords)?;
        Ok(DualVector {
            space: *self,
            coords,
        })
    }
}

fn check_coords(space: &SipSpace, coords: &[Complex64]) -> Result<()> {
    if coords.len() != space.dim {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            found: coords.len(),
        });
    }
    if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if space.field == Field::Real && coords.iter().any(|c| c.im != 0.0) {
        return Err(Error::ComplexInRealSpace);
    }
    Ok(())
}

/// Element of a [`SipSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    space: SipSpace,
    coords: Vec<Complex64>,
}

impl Vector {
    pub fn new(space: SipSpace, coords: Vec<Complex64>) -> Result<Self> {
        check_coords(&space, &coords)?;
        Ok(Self::from_trusted(space, coords))
    }

    /// Skips validation; callers guarantee length and finiteness.
    pub(crate) fn from_trusted(space: SipSpace, mut coords: Vec<Complex64>) -> Self {
        debug_assert_eq!(coords.len(), space.dim);
        if space.field == Field::Real {
            // conj() leaves -0.0 imaginary parts behind
            for c in coords.iter_mut() {
                c.im = 0.0;
            }
        }
        Self { space, coords }
    }

    pub fn space(&self) -> &SipSpace {
        &self.space
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        lp_norm(&self.coords, self.space.p)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `[self, y]`.
    pub fn sip(&self, y: &Vector) -> Result<Complex64> {
        sip_eval(self, y)
    }

    pub fn scale(&self, lambda: Complex64) -> Vector {
        let lambda = self.project_scalar(lambda);
        Vector::from_trusted(self.space, self.coords.iter().map(|c| c * lambda).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        same_space(self, other)?;
        Ok(Vector::from_trusted(
            self.space,
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        same_space(self, other)?;
        Ok(Vector::from_trusted(
            self.space,
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Rescaled to unit ℓ^p norm; zero stays zero.
    pub fn normalized(&self) -> Vector {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(Complex64::new(1.0 / n, 0.0))
        }
    }

    /// Largest coordinate-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    // Real spaces only admit real scalars.
    fn project_scalar(&self, lambda: Complex64) -> Complex64 {
        match self.space.field {
            Field::Real => Complex64::new(lambda.re, 0.0),
            Field::Complex => lambda,
        }
    }
}

fn same_space(x: &Vector, y: &Vector) -> Result<()> {
    if x.space.dim != y.space.dim {
        return Err(Error::DimensionMismatch {
            expected: x.space.dim,
            found: y.space.dim,
        });
    }
    if x.space != y.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Coordinates of a bounded functional `x ↦ Σ x_n g_n` on a [`SipSpace`].
/// The functional's norm is the ℓ^q norm of `coords`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    space: SipSpace,
    coords: Vec<Complex64>,
}

impl DualVector {
    pub(crate) fn from_trusted(space: SipSpace, coords: Vec<Complex64>) -> Self {
        Self { space, coords }
    }

    pub fn space(&self) -> &SipSpace {
        &self.space
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// ‖g‖_q.
    pub fn norm(&self) -> f64 {
        lp_norm(&self.coords, self.space.conjugate_exponent())
    }

    /// The functional evaluated at `x`.
    pub fn apply(&self, x: &Vector) -> Result<Complex64> {
        if x.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(dot(x.coords(), &self.coords))
    }
}

/// `[x, y]`.
pub fn sip_eval(x: &Vector, y: &Vector) -> Result<Complex64> {
    same_space(x, y)?;
    Ok(sip_coords(&x.coords, &y.coords, x.space.p))
}

/// ‖x‖_p.
pub fn norm(x: &Vector) -> f64 {
    x.norm()
}

/// J(y), the dual coordinates of `x ↦ [x, y]`.
pub fn duality_map(y: &Vector) -> DualVector {
    DualVector::from_trusted(y.space, dual_coords(&y.coords, y.space.p))
}

/// The unique `y` with `[x, y] = Σ x_n g_n` for all `x`.
///
/// J is inverted by the duality map of the conjugate exponent:
/// `y_n = conj(g_n) · (|g_n| / ‖g‖_q)^(q-2)`.
pub fn riesz_representer(g: &DualVector) -> Vector {
    let q = g.space.conjugate_exponent();
    Vector::from_trusted(g.space, dual_coords(&g.coords, q))
}

// --- slice kernels -------------------------------------------------------

/// Σ a_n b_n (no conjugation).
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scaled ℓ^p norm of a coordinate slice.
pub(crate) fn lp_norm(coords: &[Complex64], p: f64) -> f64 {
    let m = coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        let s: f64 = coords.iter().map(|c| (c.norm() / m).powi(2)).sum();
        return m * s.sqrt();
    }
    let s: f64 = coords.iter().map(|c| (c.norm() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// `conj(y_n) · (|y_n| / ‖y‖_p)^(p-2)`; zero in, zero out.
pub(crate) fn dual_coords(y: &[Complex64], p: f64) -> Vec<Complex64> {
    if p == 2.0 {
        return y.iter().map(|c| c.conj()).collect();
    }
    let s = lp_norm(y, p);
    if s == 0.0 {
        return vec![Complex64::new(0.0, 0.0); y.len()];
    }
    y.iter()
        .map(|c| {
            let a = c.norm();
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c.conj() * (a / s).powf(p - 2.0)
            }
        })
        .collect()
}

pub(crate) fn sip_coords(x: &[Complex64], y: &[Complex64], p: f64) -> Complex64 {
    if p == 2.0 {
        return x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
    }
    dot(x, &dual_coords(y, p))
}

// --- axiom verification --------------------------------------------------

/// Largest observed violation of each semi-inner-product axiom, all
/// normalised to be scale free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub p: f64,
    pub trials: usize,
    /// (i) `[x,x] > 0` and real for `x ≠ 0`.
    pub positivity: f64,
    /// (ii) `[λx, y] = λ[x, y]`.
    pub homogeneity_first: f64,
    /// (iii) `[x, λy] = conj(λ)[x, y]`.
    pub conj_homogeneity_second: f64,
    /// (iv) `[x + z, y] = [x, y] + [z, y]`.
    pub additivity_first: f64,
    /// (v) `|[x,y]|² ≤ [x,x][y,y]`.
    pub cauchy_schwarz: f64,
    /// `[x, y + z] = [x, y] + [x, z]`, which is not an axiom and fails for
    /// p ≠ 2. Reported to show the product is genuinely nonlinear.
    pub additivity_second: f64,
    /// The triple `(x, y, z)` that produced `additivity_second`.
    #[serde(skip)]
    pub second_slot_witness: Option<(Vector, Vector, Vector)>,
}

impl AxiomReport {
    /// Worst violation among the five axioms.
    pub fn max_violation(&self) -> f64 {
        [
            self.positivity,
            self.homogeneity_first,
            self.conj_homogeneity_second,
            self.additivity_first,
            self.cauchy_schwarz,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Samples `trials` random triples `(x, y, z)` and scalars and measures how
/// far each axiom is from holding.
pub fn verify_sip_axioms(space: &SipSpace, trials: usize, seed: u64) -> AxiomReport {
    let mut rng = stream_rng(seed, 0);
    let mut report = AxiomReport {
        p: space.p,
        trials,
        positivity: 0.0,
        homogeneity_first: 0.0,
        conj_homogeneity_second: 0.0,
        additivity_first: 0.0,
        cauchy_schwarz: 0.0,
        additivity_second: 0.0,
        second_slot_witness: None,
    };
    let p = space.p;
    for _ in 0..trials {
        let x = sample_with_zeros(&mut rng, space);
        let y = sample_with_zeros(&mut rng, space);
        let z = sample_with_zeros(&mut rng, space);
        let lambda = random_scalar(&mut rng, space.field) * 2.0;

        let (nx, ny, nz) = (x.norm(), y.norm(), z.norm());
        let xy = sip_coords(&x.coords, &y.coords, p);

        if nx > 0.0 {
            let xx = sip_coords(&x.coords, &x.coords, p);
            let v = if xx.re > 0.0 {
                xx.im.abs() / xx.re
            } else {
                1.0
            };
            report.positivity = report.positivity.max(v);
        }

        let denom = (1.0 + lambda.norm()) * nx * ny;
        if denom > 0.0 {
            let lx = x.scale(lambda);
            let v = (sip_coords(&lx.coords, &y.coords, p) - lambda * xy).norm() / denom;
            report.homogeneity_first = report.homogeneity_first.max(v);

            let ly = y.scale(lambda);
            let v = (sip_coords(&x.coords, &ly.coords, p) - lambda.conj() * xy).norm() / denom;
            report.conj_homogeneity_second = report.conj_homogeneity_second.max(v);
        }

        let denom = (nx + nz) * ny;
        if denom > 0.0 {
            let xz = x.add(&z).expect("same space");
            let zy = sip_coords(&z.coords, &y.coords, p);
            let v = (sip_coords(&xz.coords, &y.coords, p) - xy - zy).norm() / denom;
            report.additivity_first = report.additivity_first.max(v);
        }

        if nx > 0.0 && ny > 0.0 {
            let bound = (nx * nx) * (ny * ny);
            let v = ((xy.norm_sqr() - bound) / bound).max(0.0);
            report.cauchy_schwarz = report.cauchy_schwarz.max(v);
        }

        let denom = nx * (ny + nz);
        if denom > 0.0 {
            let yz = y.add(&z).expect("same space");
            let xz = sip_coords(&x.coords, &z.coords, p);
            let v = (sip_coords(&x.coords, &yz.coords, p) - xy - xz).norm() / denom;
            if v > report.additivity_second {
                report.additivity_second = v;
                report.second_slot_witness = Some((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    report
}

// Occasionally zero out coordinates so the |0|^(p-2) guard is exercised.
fn sample_with_zeros<R: Rng + ?Sized>(rng: &mut R, space: &SipSpace) -> Vector {
    let mut v = random_vector(rng, space);
    for c in v.coords.iter_mut() {
        if rng.random_bool(0.1) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    v
}
