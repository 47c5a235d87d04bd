//! Double layer potentials for second-order elliptic operators with constant
//! coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`coeffs`] holds the coefficient vector of the operator and its
//!   principal factorisation.
//! * [`fundsol`] represents fundamental solutions through their structural
//!   decomposition, with a small closed-form catalog.
//! * [`geometry`] provides parametrised boundaries and quadrature rules.
//! * [`kernelclass`] estimates kernel-class norms by stratified sampling.
//! * [`dlp`] evaluates the double layer kernel, its tangential gradient and
//!   the associated boundary operators.
//! * [`holder`] covers moduli of continuity, Hoelder seminorm estimation and
//!   the exponent case analysis for integral operators.
//! * [`cli`] runs verification suites and writes reports.
//!
//! Points are stored as three-vectors in both dimensions; for curves the
//! third component is identically zero.

pub mod bessel;
pub mod cli;
pub mod coeffs;
pub mod dlp;
pub mod error;
pub mod fundsol;
pub mod geometry;
pub mod holder;
pub mod ids;
pub mod kernelclass;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type CVec3 = Vector3<Complex64>;
pub type CMat3 = Matrix3<Complex64>;

pub(crate) fn cvec(v: &Vec3) -> CVec3 {
    v.map(|c| C64::new(c, 0.0))
}

pub(crate) fn cmat(m: &Mat3) -> CMat3 {
    m.map(|c| C64::new(c, 0.0))
}

/// Real dot product of a complex vector with a real vector.
pub(crate) fn cdot(a: &CVec3, b: &Vec3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
