//! Curvature machinery for neutral-signature Walker metrics.
//!
//! The crate evaluates a Walker metric given by three scalar fields
//! (`g33`, `g44`, `g34`) at a point, builds its Levi-Civita curvature from
//! exact second-order jets, and exposes the Ricci, Jacobi and skew-symmetric
//! curvature operators together with checks for the commutativity conditions
//! between them, the Einstein/Osserman conditions and (anti-)self-duality.
//!
//! Two-dimensional affine connections can be lifted to Walker metrics through
//! the deformed Riemannian extension ([`affine::riemannian_extension`]), and a
//! catalog of metric families with known behaviour is bundled in [`suites`].
//!
//! The numerical core (jets, metric, curvature, operators) is generic over
//! [`Scalar`] so it can run in `f32` or `f64`; the verification layers work in
//! `f64`, and the aliases below name the `f64` instantiations.

pub mod affine;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod operators;
pub mod properties;
pub mod scalar;
pub mod suites;
pub mod walker;

pub use error::{DomainError, Error, ParseError, Result};
pub use fields::{Jet1, Jet2, Point, ScalarField};
pub use scalar::Scalar;
pub use walker::{CurvatureTensor, PointCurvature, WalkerMetric};

/// A point `(x1, x2, x3, x4)` in double precision.
pub type Point4 = fields::Point<f64, 4>;
/// A base point `(x3, x4)` in double precision.
pub type BasePoint = fields::Point<f64, 2>;
/// Second-order jet in four coordinates.
pub type Jet4 = fields::Jet2<f64, 4>;
/// 4x4 matrix (endomorphisms of the tangent space, metric matrices).
pub type Matrix4 = linalg::Mat<f64, 4>;
/// 6x6 matrix acting on two-forms.
pub type Matrix6 = linalg::Mat<f64, 6>;
/// 2x2 matrix on the base of an affine surface.
pub type Matrix2 = linalg::Mat<f64, 2>;
/// Curvature tensor components at a point.
pub type Curvature = walker::CurvatureTensor<f64>;
