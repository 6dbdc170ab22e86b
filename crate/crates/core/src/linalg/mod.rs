//! Sparse and banded linear algebra used by the eigenvalue solvers.

mod eigen;
mod sparse;
mod tridiag;

pub use eigen::{smallest_deflated, EigenSolution, SubspaceOptions};
pub use sparse::{reverse_cuthill_mckee, CsrMatrix, EnvelopeCholesky, TripletBuilder};
pub use tridiag::SymTridiagonal;

/// `x^T M y` for a symmetric CSR `M`.
pub fn inner(m: &CsrMatrix, x: &[f64], y: &[f64]) -> f64 {
    dot(x, &m.mul_vec(y))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
