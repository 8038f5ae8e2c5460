//! Permanent-theoretic toolkit: permanents and subpermanents by independent
//! algorithms, the Lih–Wang gap functions for orders 4 and 6, Dittert's φ on
//! `K_n`, and multi-start searches over the Birkhoff polytope.
//!
//! Every algorithm is generic over [`Scalar`], implemented for `f64` and for
//! exact [`Rational`]s, so identities can be checked exactly and searches can
//! run in floating point with the same code.

pub mod cli;
pub mod dittert;
pub mod error;
pub mod lihwang;
pub mod matcore;
pub mod perm;
pub mod poly;
pub mod scalar;
pub mod searchlab;
pub mod suites;
pub mod symf;

pub use error::{Error, Result};
pub use matcore::{Axis, Mat, SubsetIndex, SumVectors};
pub use scalar::{Rational, Scalar, ScalarMode};
