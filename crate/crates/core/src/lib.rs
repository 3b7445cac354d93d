//! Affine quantization on the half-line.
//!
//! The crate covers the free affine particle and the half harmonic
//! oscillator in closed form, a finite-difference eigensolver for the
//! spiked family `−d²/dx² + α/(x+b)² + λ²x²`, and a set of cross-checks that
//! tie the two together.
//!
//! - [`specfun`]: Γ, Pochhammer, J₁ and its zeros, terminating ₁F₁, Gauss–Legendre.
//! - [`model`]: physical parameters, potentials, grids and the dilation operator.
//! - [`analytic`]: closed-form eigenstates and normalization.
//! - [`eigensolve`]: tridiagonal Hamiltonian, Sturm bisection, Richardson, b-sweep.
//! - [`verify`]: closure, orthonormality and residual reports.
//! - [`cli`]: command implementations and table output for the binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod model;
pub mod output;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
