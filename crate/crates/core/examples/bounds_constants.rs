//! The constants in the two-sided bound on F over convex domains and the
//! quartic root brackets behind the upper one.

use spectral_lab::bounds::{
    constant_k, lower_bound_constant, quartic_roots, verify_lemma_brackets,
};
use spectral_lab::cli::sig12;

fn main() -> spectral_lab::Result<()> {
    let k = constant_k(1000, 1e-10)?;
    println!(
        "K = {} at tau = {}, 2(1 + K) = {}",
        sig12(k.k),
        sig12(k.tau_star),
        sig12(k.upper_bound)
    );
    let lower = lower_bound_constant();
    println!(
        "lower constant = {} (branches differ by {:.1e})",
        sig12(lower.value),
        lower.mismatch
    );
    for tau in [0.01, 0.5, 0.95] {
        let r = quartic_roots(tau)?;
        let roots: Vec<String> = r.roots.iter().map(|&y| sig12(y)).collect();
        println!("tau = {tau}: roots {} ({:?})", roots.join(", "), r.case);
    }
    let check = verify_lemma_brackets(1000);
    println!(
        "bracket checks {} failures {}",
        check.checks,
        check.failures.len()
    );
    Ok(())
}
