//! Quadratic finite elements on triangles and the disk: mu_1, sigma_1 and F
//! against known values.

use std::f64::consts::PI;

use spectral_lab::bessel::j1_prime_first_zero;
use spectral_lab::cli::sig12;
use spectral_lab::fem2d::f_of_domain;
use spectral_lab::geom2d::{named, NamedShape};

fn main() -> spectral_lab::Result<()> {
    let t1 = f_of_domain(&named(NamedShape::T1)?, 0.02)?;
    println!(
        "T1: sigma1 {} mu1 {} (16 pi^2/9 = {}) F {}",
        sig12(t1.sigma1),
        sig12(t1.mu1),
        sig12(16.0 * PI * PI / 9.0),
        sig12(t1.f)
    );
    let t2 = f_of_domain(&named(NamedShape::T2)?, 0.02)?;
    println!(
        "T2: sigma1 {} mu1 {} (pi^2 = {}) F {}",
        sig12(t2.sigma1),
        sig12(t2.mu1),
        sig12(PI * PI),
        sig12(t2.f)
    );
    let disk = f_of_domain(&named(NamedShape::Disk(256))?, 0.02)?;
    println!(
        "disk(256): sigma1 P {} (2 pi = {}) mu1 |Omega| {} (pi j'11^2 = {}) dofs {}",
        sig12(disk.x),
        sig12(2.0 * PI),
        sig12(disk.y),
        sig12(PI * j1_prime_first_zero().powi(2)),
        disk.dofs
    );
    Ok(())
}
