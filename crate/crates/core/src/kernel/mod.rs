//! Polytope representations and the primitive operations on them.

pub(crate) mod dd;
pub mod json;
pub mod linalg;
pub mod ops;
pub mod polytope;
pub mod scalar;
pub mod subset;

pub use json::{AnyPolytope, Polytope};
pub use ops::{
    conv_union, contains_scaled, gauge, inclusion, intersect, lift_cylinder, max_norm, min_scale_factor,
    minkowski_sum, project, radial, ray_extent, section, section_affine, support,
};
pub use polytope::{default_tol, HPolytope, Halfspace, VPolytope};
pub use scalar::{convert_vec, lex_cmp_tol, parse_rational, vec_eq_tol, Mode, Rational, Scalar, DEFAULT_TOL};
pub use subset::CoordSubset;
