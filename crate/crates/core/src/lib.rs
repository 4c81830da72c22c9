//! Exact and floating-point verification toolkit for the cotangent bundle
//! `T*h(2n+1)` of the Heisenberg Lie algebra: automorphisms, metric moduli,
//! ad-invariant metrics, complex structures, closed invariant 2-forms and
//! curvature of left-invariant metrics.

pub mod adinvariant;
pub mod automorphism;
pub mod complex;
pub mod curvature;
pub mod echelon;
pub mod error;
pub mod forms;
pub mod lie;
pub mod matrix;
pub mod metric;
pub mod par;
pub mod scalar;

pub use adinvariant::{pairing_metric, AdInvariantForm};
pub use automorphism::{assemble, AutParams, Automorphism};
pub use complex::{j0, AlmostComplexStructure};
pub use curvature::Signature;
pub use error::{Error, Result};
pub use forms::{OmegaParams, TwoForm};
pub use lie::{build_heisenberg, build_thn, cotangent_algebra, LieAlgebra, ThnBasis};
pub use matrix::Matrix;
pub use metric::{BilinearForm, CanonicalMetric};
pub use scalar::{q, Rational, Scalar};
