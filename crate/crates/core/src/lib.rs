//! Exact computational geometry for k-edge graphs, expected k-facet counts,
//! curve/graph intersections and translation ranges of convex bodies.
//!
//! The geometric kernels are generic over [`scalar::Scalar`]; the aliases
//! below fix the exact rational instantiation used by the public workflows.

pub mod dist;
pub mod curves;
pub mod estimator;
pub mod generators;
pub mod geom;
pub mod kfacet;
pub mod poly;
pub mod scalar;
pub mod tc;

pub use num_rational::BigRational;

pub type Rational = BigRational;
pub type Point = geom::Point2<Rational>;
pub type Points = geom::PointSet<Rational>;
pub type LatticePoint = geom::Point2<i128>;
