//! Weighted Neumann and Steklov eigenvalues of a profile and the functional
//! `F(h) = mu_1(h) int h / sigma_1(h)`.

use spectral_lab::cli::sig12;
use spectral_lab::profiles::Profile;
use spectral_lab::sl1d::{f_of_h, DEFAULT_ELEMENTS};

fn main() -> spectral_lab::Result<()> {
    let cases = [
        ("h = 1", Profile::constant(1.0)),
        ("h = 6x(1-x)", Profile::parabolic_star(2001)?),
        ("tent(0.5)", Profile::triangular(0.5)?),
        ("tent(0.2)", Profile::triangular(0.2)?),
    ];
    println!(
        "{:<14} {:>16} {:>16} {:>16}",
        "profile", "mu1", "sigma1", "F"
    );
    for (name, h) in cases {
        let r = f_of_h(&h, DEFAULT_ELEMENTS)?;
        println!(
            "{name:<14} {:>16} {:>16} {:>16}",
            sig12(r.mu1),
            sig12(r.sigma1),
            sig12(r.f)
        );
    }
    println!("pi^2 = {}", sig12(std::f64::consts::PI.powi(2)));
    Ok(())
}
