//! Collapsing thin domains: eigenvalues of `|y| <= eps h(x)` as eps -> 0
//! approach the one-dimensional weighted problems.

use spectral_lab::cli::sig12;
use spectral_lab::fem2d::{thin_sweep, ThinMeshOptions};
use spectral_lab::profiles::Profile;

fn main() -> spectral_lab::Result<()> {
    let eps = [0.2, 0.1, 0.05, 0.025];
    // rhombi: h+ = h- = T/2, so h = T and 2 sigma1 / eps -> sigma1(T) = j01^2
    let half = Profile::triangular(0.5)?.scaled(0.5);
    let s = thin_sweep(&half, &half, &eps, ThinMeshOptions::default())?;
    for r in &s.rows {
        println!(
            "rhombus eps {:<6} mu1 {:>16} 2 sigma1/eps {:>16} F {:>16}",
            r.eps,
            sig12(r.mu1),
            sig12(r.scaled_sigma),
            sig12(r.f)
        );
    }
    println!("limit mu1 {} (1D {})", sig12(s.mu1_limit), sig12(s.mu1_1d));
    println!(
        "limit 2 sigma1/eps {} (1D {})",
        sig12(s.scaled_sigma_limit),
        sig12(s.sigma1_1d)
    );
    println!("limit F {} (1D {})", sig12(s.f_limit), sig12(s.f_1d));

    // rectangles [0, 1] x [0, eps]
    let r = thin_sweep(
        &Profile::constant(1.0),
        &Profile::constant(0.0),
        &eps,
        ThinMeshOptions::default(),
    )?;
    println!(
        "rectangles: F limit {} (1D {})",
        sig12(r.f_limit),
        sig12(r.f_1d)
    );
    Ok(())
}
