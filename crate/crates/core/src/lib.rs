//! Heat kernels, Doob transforms, Muckenhoupt weights and Hardy/BMO functionals
//! on concrete model spaces, with machine-readable numerical certificates.
//!
//! Evaluators that are pure numerics (quadrature, special functions, kernels,
//! profiles, ball masses) are generic over [`Real`]; piecewise polynomials are
//! generic over [`Field`] so atoms can be handled in exact rational arithmetic.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod spaces;
pub mod special;
pub mod kernels;
pub mod doob;
pub mod weights;
pub mod piecewise;
pub mod grid;
pub mod functionals;
pub mod atoms;
pub mod cli;

pub use error::{Error, Result};
pub use kernels::{HarmonicProfile, KernelFamily};
pub use scalar::{Field, Real};
pub use spaces::{Ball, Boundary, Density, ModelSpace, WeightedMeasure};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;
pub type ExactPiecewise = piecewise::Piecewise<Rational>;
pub type FloatPiecewise = piecewise::Piecewise<f64>;
pub type ExactAtom = atoms::Atom<Rational>;
