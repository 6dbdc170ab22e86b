//! sigma_1 from the Green-kernel integral operator against the Galerkin value.

use spectral_lab::cli::sig12;
use spectral_lab::profiles::Profile;
use spectral_lab::sl1d::{sigma1, sigma1_kernel_oracle, DEFAULT_ELEMENTS, DEFAULT_ORACLE_POINTS};

fn main() -> spectral_lab::Result<()> {
    for (name, h) in [
        ("constant", Profile::constant(1.0)),
        ("6x(1-x)", Profile::parabolic_star(2001)?),
        (
            "x + 0.5",
            Profile::new(vec![0.0, 1.0], vec![0.5, 1.5])?.normalize()?,
        ),
    ] {
        let g = sigma1(&h, DEFAULT_ELEMENTS)?.eigenvalue;
        let o = sigma1_kernel_oracle(&h, DEFAULT_ORACLE_POINTS)?;
        println!(
            "{name:<10} galerkin {:>16} kernel {:>16} rel {:.2e}",
            sig12(g),
            sig12(o.eigenvalue),
            (o.eigenvalue / g - 1.0).abs()
        );
    }
    Ok(())
}
