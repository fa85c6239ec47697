//! Convex polynomials of the operator and the machinery built on them.

mod hull;
mod polynomial;
mod probes;
mod transitivity;

pub use hull::{hull_distance, HullMethod, HullOptions, HullResult, HullStep, TRUNCATION_FLAG};
pub use polynomial::{lemma_combine, proof_polynomial, ConvexPolynomial};
pub use probes::{
    eigen_recurrence_probe, hahn_banach_probe, lambda_sweep, EigenProbe, FunctionalProbe, LambdaGrid,
    SpectrumVerdict,
};
pub use transitivity::{s_k_map, transitivity_demo, TransitivityRow};
