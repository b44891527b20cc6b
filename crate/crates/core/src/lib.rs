//! Numerical toolkit for p-approximate Schauder frames (p-ASFs) on
//! finite-dimensional ℓ^p spaces equipped with the Lumer–Giles
//! semi-inner product.
//!
//! * [`sip`]: spaces, the semi-inner product, the duality map and its inverse.
//! * [`operators`]: dense operators, inversion, the generalized adjoint and
//!   mixed-norm estimation.
//! * [`frames`]: the p-ASF type, frame operators, canonical duals and
//!   random generators.
//! * [`identities`]: frame identities and the 3/4 lower bound, evaluated
//!   both by literal summation and by operator composition.
//! * [`search`]: descent on the unit sphere for extremal ratios and for
//!   hypothesis violations.
//! * [`io`]: the JSON frame-file format.

pub mod error;
pub mod frames;
pub mod identities;
pub mod io;
pub mod operators;
pub mod rng;
pub mod search;
pub mod sip;
pub mod verify;

pub use error::{Error, Result};
pub use frames::{FrameReport, IndexSet, Pasf};
pub use num_complex::Complex64;
pub use operators::LinearOperator;
pub use sip::{Field, SipSpace, Vector};
