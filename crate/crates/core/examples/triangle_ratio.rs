//! mu_1 / sigma_1 = 4 for every tent profile, from Bessel roots and from the
//! Galerkin solver.

use spectral_lab::bessel::{mu1_tent, sigma1_tent};
use spectral_lab::profiles::Profile;
use spectral_lab::sl1d::{mu1, sigma1, DEFAULT_ELEMENTS};

fn main() -> spectral_lab::Result<()> {
    println!("{:>5} {:>14} {:>14}", "x0", "bessel - 4", "galerkin - 4");
    for k in 1..=9 {
        let x0 = k as f64 / 10.0;
        let exact = mu1_tent(x0)?.value / sigma1_tent(x0)?.value;
        let h = Profile::triangular(x0)?;
        let fem = mu1(&h, DEFAULT_ELEMENTS)?.eigenvalue / sigma1(&h, DEFAULT_ELEMENTS)?.eigenvalue;
        println!("{x0:>5} {:>14.2e} {:>14.2e}", exact - 4.0, fem - 4.0);
    }
    Ok(())
}
