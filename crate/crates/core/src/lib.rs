//! Numerical laboratory for the ratio between the normalized first Neumann
//! eigenvalue `mu_1 |Omega|` and the normalized first Steklov eigenvalue
//! `sigma_1 P(Omega)` of planar domains.
//!
//! The crate covers
//!
//! * concave profiles on `[0, 1]` and the weighted one-dimensional problems
//!   they generate ([`profiles`], [`sl1d`]),
//! * closed-form values for triangular profiles through Bessel functions
//!   ([`bessel`]),
//! * the explicit constants of the upper and lower bounds ([`bounds`]),
//! * convex polygon geometry and quadratic finite elements ([`geom2d`],
//!   [`fem2d`]),
//! * first and second variations around the constant profile and a local
//!   optimizer ([`variations`]),
//! * sampling campaigns for the attainable set of `(sigma_1 P, mu_1 |Omega|)`
//!   ([`diagram`]),
//! * and a thin command-line front end ([`cli`]).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bounds;
pub mod cli;
pub mod diagram;
mod error;
pub mod fem2d;
pub mod geom2d;
pub mod linalg;
pub mod profiles;
pub mod sl1d;
pub mod variations;

pub use error::{Error, Result};
pub use fem2d::{EigenPair2D, FunctionalRecord, TriangleMesh};
pub use geom2d::{ConvexPolygon, GeometryFunctionals, Point};
pub use profiles::Profile;
pub use sl1d::SpectralResult;
