//! Analysis of the inflection curves of rational vector fields
//! `-R(z) d/dz` on the complex plane.
//!
//! Given a rational function `R = Q/P`, the points where trajectories of
//! the field bend through zero curvature form a real algebraic curve: the
//! zero set of a real bivariate polynomial built from the Wronskian of
//! `(Q, P)`. This crate constructs that polynomial, analyzes the local
//! structure at poles, the asymptotic ends, exactness of differentials and
//! their rational primitives, low-degree normal forms, connectivity of the
//! separated-variable complexification, and traces and renders the curve
//! together with field trajectories.

pub mod classify;
pub mod error;
pub mod exactness;
pub mod expr;
pub mod geometry;
pub mod inflection;
mod jsonutil;
pub mod monodromy;
pub mod poly;
pub mod ratfun;
pub mod roots;
pub mod tracer;

pub use error::Error;
pub use num_complex::Complex64;
pub use poly::ComplexPoly;
pub use ratfun::RationalFunction;

pub type Result<T> = std::result::Result<T, Error>;
