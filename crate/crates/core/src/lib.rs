//! Smoothing splines on Riemannian manifolds built from exponential and
//! logarithm maps.
//!
//! Data on a manifold are lifted to the tangent spaces of a few anchor points,
//! a Euclidean natural cubic smoothing spline is solved in each tangent space,
//! and the resulting curves are mapped back and blended geodesically into one
//! C¹ curve `B: [0, n] → M`. In flat space the result is exactly the natural
//! cubic smoothing spline.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blend;
pub mod cli;
pub mod error;
pub mod manifold;
pub mod model;
pub mod oracle;
pub mod spline1d;

pub use blend::{fit, select_anchors, weight, AnchorSet, BlendedSpline, FitProblem, Junction};
pub use error::{Error, Result};
pub use manifold::{
    AnyManifold, Euclidean, Manifold, ManifoldDescriptor, ManifoldKind, Point, So3, Sphere2,
    TangentVector,
};
pub use spline1d::{solve_smoothing_spline, CubicPiece, KnotGrid, SmoothingSpline};
