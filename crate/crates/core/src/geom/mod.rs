//! Exact rational linear algebra and convex geometry.
//!
//! Nothing in here touches floating point. Polytopes are kept in canonical
//! V-representation (irredundant, lexicographically sorted vertices) so that
//! structural equality is geometric equality.

pub mod linalg;
pub(crate) mod lp;
mod polytope;
mod subspace;
mod vector;

pub use linalg::rank;
pub use polytope::{
    affine_dim, contains_point, extreme_points, in_convex_hull, segment_covered, segment_parameters, uncovered_gaps,
    Halfspace, ParamGap, RationalPolytope,
};
pub use subspace::{first_outside_span, in_span, SubspaceBasis};
pub use vector::HomologyVector;
