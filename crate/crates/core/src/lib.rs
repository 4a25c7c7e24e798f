//! Multiscale singularity analysis for the heat equation.
//!
//! * [`poly`]: exact rational polynomials in space and scale, heat residuals and heat flow.
//! * [`heat_forms`]: stable normal forms and their exact heat-equation check.
//! * [`damon`]: closed-form critical branches of `x³ − 6xy² + y² − 6sx + 2s`.
//! * [`scale_space`]: numerical Gaussian scale space, critical point detection,
//!   tracking and bifurcation events.
//! * [`unfolding`]: the elliptic umbilic unfolding, its discriminant and the
//!   embedding of the worked example.

// `!(a > b)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damon;
pub mod heat_forms;
pub mod morse;
pub mod poly;
pub mod scale_space;
pub mod unfolding;

pub use morse::{Branch, CriticalPoint, EigenPair, MorseType, SymMat2};
pub use poly::{Point, Polynomial, Rational, Var};
