//! Bessel functions, their first zeros, and the tent eigenvalues they give.

use spectral_lab::bessel::{j0, j0_first_zero, j1, j1_prime_first_zero, mu1_tent, sigma1_tent};
use spectral_lab::cli::sig12;

fn main() -> spectral_lab::Result<()> {
    for x in [0.5, 2.0, 10.0, 40.0] {
        println!(
            "J0({x}) = {:>20}   J1({x}) = {:>20}",
            sig12(j0(x)),
            sig12(j1(x))
        );
    }
    println!("j01  = {}", sig12(j0_first_zero()));
    println!("j'11 = {}", sig12(j1_prime_first_zero()));
    for x0 in [0.1, 0.3, 0.5] {
        let s = sigma1_tent(x0)?;
        let m = mu1_tent(x0)?;
        println!(
            "x0 = {x0}: sigma1 {:>16} mu1 {:>16} ratio {}",
            sig12(s.value),
            sig12(m.value),
            sig12(m.value / s.value)
        );
    }
    println!("4 j01^2 = {}", sig12(4.0 * j0_first_zero().powi(2)));
    Ok(())
}
