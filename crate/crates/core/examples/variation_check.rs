//! Derivatives of sigma_1, mu_1 and F at h = 1, closed forms against
//! finite differences of the discrete eigenvalues.

use std::f64::consts::PI;

use spectral_lab::cli::sig12;
use spectral_lab::profiles::{uniform_knots, Profile};
use spectral_lab::variations::{
    eigenfunction_derivative_residuals, first_variation_f, first_variation_mu,
    first_variation_sigma, second_variation_f_linear,
};

fn main() -> spectral_lab::Result<()> {
    let phi = Profile::from_fn(uniform_knots(257), |x| (2.0 * PI * x).cos())?;
    let mut reports = vec![
        first_variation_sigma(&phi, "cos 2 pi x")?,
        first_variation_mu(&phi, "cos 2 pi x")?,
        first_variation_f(&phi, "cos 2 pi x")?,
    ];
    reports.extend(second_variation_f_linear(1.0)?);
    for r in &reports {
        println!(
            "{:<11} closed {:>18} fd {:>18} rel {:.1e}",
            r.quantity,
            sig12(r.analytic),
            sig12(r.finite_difference),
            r.rel_error
        );
    }
    let res = eigenfunction_derivative_residuals(1.0);
    println!(
        "v' ODE residual {:.1e}, u' ODE residual {:.1e}",
        res.v_ode, res.u_ode
    );
    println!(
        "int u' u0 = {} = -A/4; the condition -2A/pi^2 = {} does not hold",
        sig12(res.u_projection),
        sig12(res.u_projection_displayed)
    );
    Ok(())
}
