//! Calabi's extremal Kähler metrics on the blow-up of CPⁿ at a point,
//! constructed from moment-polytope data and checked against three
//! independent scalar-curvature formulas:
//!
//! * the one-variable radial formula ([`radial`]),
//! * Abreu's formula on the full polytope ([`abreu`]),
//! * Calabi's formula on the Kähler side ([`bridge`]).
//!
//! [`calabi`] builds the extremal profiles and [`cli`] drives the command
//! line front end.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abreu;
pub mod bridge;
pub mod calabi;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod polytope;
pub mod radial;

pub use abreu::{
    abreu_scalar_curvature, extremality_residual, numeric_hessian, SymplecticPotential,
};
pub use bridge::{
    bridge_cross_check, calabi_scalar_curvature, f_of_t, s_of_t, t_of_s, KahlerPotential,
};
pub use calabi::{
    alpha_eval, boundary_system, build_extremal_metric, closed_form_coefficients, endpoint_limits,
    extremal_f_second, h_second, solve_coefficients, ExtremalCoefficients, ExtremalMetric,
};
pub use error::{Error, Result};
pub use polytope::{build_blowup_polytope, AffineFacet, MomentPolytope};
pub use radial::{
    radial_hessian, radial_hessian_inverse, radial_scalar_curvature, validity_check, TPotential,
};
