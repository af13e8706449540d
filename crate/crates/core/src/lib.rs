//! Constant-curvature 2+1 spacetimes from surface-group data.
//!
//! - [`minkowski`]: ℝ^{2+1}, the hyperboloid model and PSL(2,ℝ) ≅ SO(2,1)₀.
//! - [`fuchsian`]: surface-group words, representations, balls, Euler classes.
//! - [`lamination`]: weighted multicurves, their lifts and transverse vectors.
//! - [`flat`]: translation cocycles and developed flat domains of dependence.
//! - [`earthquake`]: earthquakes along finite laminations and their boundary maps.
//! - [`ads`]: the projective anti-de Sitter model, convex hulls and bending.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ads;
pub mod earthquake;
pub mod flat;
pub mod fuchsian;
pub mod lamination;
pub mod minkowski;

mod error;

pub use error::Error;
pub use minkowski::{
    adjoint_to_so21, classify, geodesic_normal, h2_distance, minkowski_inner, CausalClass, HyperbolicPoint,
    IdealPoint, LorentzIsometry, LorentzLinear, Mat2, MinkowskiVector, DEFAULT_EPS,
};
