//! Numerical laboratory for weighted translation operators `T_{g,w}` on
//! `L^p` spaces over the integers and over uniformly gridded real lines.
//!
//! The crate evaluates liminf criteria for convex-cyclicity and
//! hypercyclicity on compact windows, reproduces the operator identities that
//! drive the convex-transitivity argument, and measures how close convex
//! combinations of an orbit come to a target.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod convex;
pub mod criteria;
pub mod error;
pub mod lattice;
pub mod operator;
pub mod weights;

pub use convex::ConvexPolynomial;
pub use error::{Error, Result};
pub use lattice::{CompactVector, Lattice, StepElement, Window, C64};
pub use operator::WeightedTranslation;
pub use weights::LatticeWeight;
