//! Variations of `sigma_1`, `mu_1` and `F` around the constant profile, and
//! a local optimizer for `F` over concave profiles.
//!
//! At `h = 1` both eigenvalues equal `pi^2` with eigenfunction
//! `sqrt 2 cos(pi x)`. Along `h = 1 + t phi`:
//!
//! * `sigma' = 2 pi^2 int phi sin^2(pi x)`,
//! * `mu' = 2 pi^2 int phi (sin^2(pi x) - cos^2(pi x))`,
//! * `F' = -int phi cos(2 pi x)`,
//!
//! and along `phi = A x`: `sigma'' = A^2 (3 - pi^2) / 8`, `mu'' = 3 A^2 / 2`,
//! `F'' = A^2 (9 + pi^2) / (8 pi^2)`.

use std::f64::consts::{PI, SQRT_2};
use std::ops::{Add, Mul, Neg, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::profiles::{project_concave, random_concave, uniform_knots, Profile};
use crate::sl1d::{self, ProblemKind};
use crate::{Error, Result};

/// Central-difference steps, each half the previous.
pub const FD_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
/// Grid used for every eigenvalue in a difference quotient.
pub const FD_ELEMENTS: usize = sl1d::DEFAULT_ELEMENTS;

/// Closed form against finite differences.
#[derive(Clone, Debug, Serialize)]
pub struct VariationReport {
    pub quantity: String,
    pub direction: String,
    pub analytic: f64,
    /// Richardson combination of the difference quotients.
    pub finite_difference: f64,
    pub steps: Vec<f64>,
    /// Raw difference quotient at each step.
    pub quotients: Vec<f64>,
    /// `log2` of successive quotient-error ratios; `None` when the
    /// differences are at rounding level.
    pub observed_order: Option<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
}

/// Relative size below which quotient differences are treated as eigensolver
/// rounding rather than truncation error.
const FIRST_NOISE: f64 = 1e-9;
const SECOND_NOISE: f64 = 1e-5;

impl VariationReport {
    fn new(
        quantity: &str,
        direction: &str,
        analytic: f64,
        steps: &[f64],
        quotients: Vec<f64>,
        noise: f64,
    ) -> Self {
        let fd = richardson(&quotients);
        let observed_order = if quotients.len() >= 3 {
            let d1 = (quotients[0] - quotients[1]).abs();
            let d2 = (quotients[1] - quotients[2]).abs();
            let floor = noise * quotients[2].abs().max(1.0);
            (d2 > floor).then(|| (d1 / d2).log2())
        } else {
            None
        };
        let abs_error = (fd - analytic).abs();
        VariationReport {
            quantity: quantity.into(),
            direction: direction.into(),
            analytic,
            finite_difference: fd,
            steps: steps.to_vec(),
            quotients,
            observed_order,
            abs_error,
            rel_error: abs_error / analytic.abs().max(1e-300),
        }
    }
}

/// Richardson table for quotients with error `c2 t^2 + c4 t^4 + ...` at
/// halving steps.
fn richardson(q: &[f64]) -> f64 {
    let mut t = q.to_vec();
    let mut factor = 4.0;
    while t.len() > 1 {
        t = t
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    t[0]
}

/// Five-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_889),
    (-0.538_469_310_105_683, 0.478_628_670_499_366),
    (0.538_469_310_105_683, 0.478_628_670_499_366),
    (-0.906_179_845_938_664, 0.236_926_885_056_189),
    (0.906_179_845_938_664, 0.236_926_885_056_189),
];

/// `int_a^b f` by composite Gauss-Legendre on `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * w;
            GAUSS5
                .iter()
                .map(|&(x, wt)| wt * f(mid + 0.5 * w * x))
                .sum::<f64>()
                * 0.5
                * w
        })
        .sum()
}

/// `int_0^1 phi g` for piecewise-linear `phi`, exact up to the quadrature of
/// `g` on each linear piece.
pub fn integrate_against(phi: &Profile, g: impl Fn(f64) -> f64) -> f64 {
    phi.knots()
        .windows(2)
        .map(|w| integrate(|x| phi.eval(x) * g(x), w[0], w[1], 4))
        .sum()
}

pub fn sigma_dot_closed_form(phi: &Profile) -> f64 {
    2.0 * PI * PI * integrate_against(phi, |x| (PI * x).sin().powi(2))
}

pub fn mu_dot_closed_form(phi: &Profile) -> f64 {
    2.0 * PI * PI * integrate_against(phi, |x| -(2.0 * PI * x).cos())
}

pub fn f_dot_closed_form(phi: &Profile) -> f64 {
    -integrate_against(phi, |x| (2.0 * PI * x).cos())
}

/// `mu'/pi^2 + int phi - sigma'/pi^2`, the derivative of `mu int h / sigma`.
pub fn f_dot_from_components(phi: &Profile) -> f64 {
    (mu_dot_closed_form(phi) - sigma_dot_closed_form(phi)) / (PI * PI) + phi.integral()
}

fn eigen(kind: ProblemKind, h: &Profile) -> Result<f64> {
    Ok(sl1d::solve(h, kind, FD_ELEMENTS)?.eigenvalue)
}

fn f_value(h: &Profile) -> Result<f64> {
    Ok(sl1d::f_of_h(h, FD_ELEMENTS)?.f)
}

fn central_first(g: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    FD_STEPS
        .par_iter()
        .map(|&t| Ok((g(t)? - g(-t)?) / (2.0 * t)))
        .collect()
}

fn central_second(g: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let g0 = g(0.0)?;
    FD_STEPS
        .par_iter()
        .map(|&t| Ok((g(t)? - 2.0 * g0 + g(-t)?) / (t * t)))
        .collect()
}

fn check_direction(phi: &Profile) -> Result<()> {
    let bound = phi.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(bound.is_finite()) {
        return Err(Error::InvalidArgument(
            "direction has non-finite values".into(),
        ));
    }
    if bound * FD_STEPS[0] >= 0.5 {
        return Err(Error::InvalidArgument(format!(
            "direction too large: 1 + t phi must stay positive for t = {}",
            FD_STEPS[0]
        )));
    }
    Ok(())
}

/// `d/dt sigma_1(1 + t phi)` at 0.
pub fn first_variation_sigma(phi: &Profile, label: &str) -> Result<VariationReport> {
    check_direction(phi)?;
    let one = Profile::constant(1.0);
    let q = central_first(|t| eigen(ProblemKind::SteklovWeighted, &one.perturbed(phi, t)))?;
    Ok(VariationReport::new(
        "sigma_dot",
        label,
        sigma_dot_closed_form(phi),
        &FD_STEPS,
        q,
        FIRST_NOISE,
    ))
}

/// `d/dt mu_1(1 + t phi)` at 0.
pub fn first_variation_mu(phi: &Profile, label: &str) -> Result<VariationReport> {
    check_direction(phi)?;
    let one = Profile::constant(1.0);
    let q = central_first(|t| eigen(ProblemKind::NeumannWeighted, &one.perturbed(phi, t)))?;
    Ok(VariationReport::new(
        "mu_dot",
        label,
        mu_dot_closed_form(phi),
        &FD_STEPS,
        q,
        FIRST_NOISE,
    ))
}

/// `d/dt F(1 + t phi)` at 0, evaluated without renormalizing.
pub fn first_variation_f(phi: &Profile, label: &str) -> Result<VariationReport> {
    check_direction(phi)?;
    let one = Profile::constant(1.0);
    let q = central_first(|t| f_value(&one.perturbed(phi, t)))?;
    Ok(VariationReport::new(
        "F_dot",
        label,
        f_dot_closed_form(phi),
        &FD_STEPS,
        q,
        FIRST_NOISE,
    ))
}

/// Closed forms of the second derivatives along `A x`.
pub fn sigma_ddot_linear(a: f64) -> f64 {
    a * a * (3.0 - PI * PI) / 8.0
}

pub fn mu_ddot_linear(a: f64) -> f64 {
    1.5 * a * a
}

pub fn f_ddot_linear(a: f64) -> f64 {
    a * a * (9.0 + PI * PI) / (8.0 * PI * PI)
}

/// Second differences of `sigma_1`, `mu_1` and `F` along `1 + t A x`.
pub fn second_variation_f_linear(a: f64) -> Result<[VariationReport; 3]> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "slope A must be finite and nonzero, got {a}"
        )));
    }
    let phi = Profile::new(vec![0.0, 1.0], vec![0.0, a])?;
    check_direction(&phi)?;
    let one = Profile::constant(1.0);
    let label = format!("A x, A = {a}");
    let sigma = central_second(|t| eigen(ProblemKind::SteklovWeighted, &one.perturbed(&phi, t)))?;
    let mu = central_second(|t| eigen(ProblemKind::NeumannWeighted, &one.perturbed(&phi, t)))?;
    let f = central_second(|t| f_value(&one.perturbed(&phi, t)))?;
    Ok([
        VariationReport::new(
            "sigma_ddot",
            &label,
            sigma_ddot_linear(a),
            &FD_STEPS,
            sigma,
            SECOND_NOISE,
        ),
        VariationReport::new(
            "mu_ddot",
            &label,
            mu_ddot_linear(a),
            &FD_STEPS,
            mu,
            SECOND_NOISE,
        ),
        VariationReport::new(
            "F_ddot",
            &label,
            f_ddot_linear(a),
            &FD_STEPS,
            f,
            SECOND_NOISE,
        ),
    ])
}

/// Value with first and second derivative, for exact differentiation of the
/// closed-form eigenfunction derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub fn var(x: f64) -> Self {
        Jet2 {
            v: x,
            d1: 1.0,
            d2: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Jet2 {
            v: c,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Jet2 {
            v: s,
            d1: c * self.d1,
            d2: c * self.d2 - s * self.d1 * self.d1,
        }
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Jet2 {
            v: c,
            d1: -s * self.d1,
            d2: -s * self.d2 - c * self.d1 * self.d1,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Jet2 {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

/// `sqrt 2 cos(pi x)`, the normalized eigenfunction at `h = 1`.
pub fn u0(x: Jet2) -> Jet2 {
    x.scale(PI).cos().scale(SQRT_2)
}

/// Derivative of the Steklov-type eigenfunction along `A x`:
/// `(A/(4 sqrt 2) - A x/(2 sqrt 2)) cos(pi x) + (A/(2 sqrt 2 pi) + A pi (x^2 - x)/(2 sqrt 2)) sin(pi x)`.
pub fn v_dot(a: f64, x: Jet2) -> Jet2 {
    let c = Jet2::constant;
    let r = 2.0 * SQRT_2;
    let p = c(a / (2.0 * r)) - x.scale(a / r);
    let q = c(a / (r * PI)) + (x * x - x).scale(a * PI / r);
    p * x.scale(PI).cos() + q * x.scale(PI).sin()
}

/// Derivative of the Neumann-type eigenfunction along `A x`:
/// `A / sqrt 2 (sin(pi x)/pi - x cos(pi x))`.
pub fn u_dot(a: f64, x: Jet2) -> Jet2 {
    (x.scale(PI).sin().scale(1.0 / PI) - x * x.scale(PI).cos()).scale(a / SQRT_2)
}

/// Residuals of the closed-form eigenfunction derivatives.
#[derive(Clone, Debug, Serialize)]
pub struct EigenfunctionResiduals {
    pub a: f64,
    /// `sup |-v'' - pi^2 v - rhs|` on the sample grid.
    pub v_ode: f64,
    /// `max(|v'(0)|, |v'(1)|)`.
    pub v_boundary: f64,
    /// `int v_dot u0`, which must vanish.
    pub v_orthogonality: f64,
    pub u_ode: f64,
    pub u_boundary: f64,
    /// `int u_dot u0`.
    pub u_projection: f64,
    /// `-A/4`: the value forced by differentiating `int (1 + t A x) u^2 = 1`.
    pub u_projection_from_normalization: f64,
    /// `A int x cos(pi x) = -2A/pi^2`, the side condition as displayed next
    /// to the closed form; the closed form does not satisfy it.
    pub u_projection_displayed: f64,
}

impl EigenfunctionResiduals {
    /// All conditions implied by the eigenvalue problem hold to `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.v_ode <= tol
            && self.v_boundary <= tol
            && self.v_orthogonality.abs() <= tol
            && self.u_ode <= tol
            && self.u_boundary <= tol
            && (self.u_projection - self.u_projection_from_normalization).abs() <= tol
    }
}

/// Samples used for the sup-norm residuals.
pub const RESIDUAL_SAMPLES: usize = 1001;

pub fn eigenfunction_derivative_residuals(a: f64) -> EigenfunctionResiduals {
    let v_rhs = |x: f64| {
        (a * PI * PI / SQRT_2 - a * x * SQRT_2 * PI * PI) * (PI * x).cos()
            - a * SQRT_2 * PI * (PI * x).sin()
    };
    let u_rhs = |x: f64| -a * SQRT_2 * PI * (PI * x).sin();
    let mut v_ode = 0.0_f64;
    let mut u_ode = 0.0_f64;
    for i in 0..RESIDUAL_SAMPLES {
        let x = i as f64 / (RESIDUAL_SAMPLES - 1) as f64;
        let v = v_dot(a, Jet2::var(x));
        let u = u_dot(a, Jet2::var(x));
        v_ode = v_ode.max((-v.d2 - PI * PI * v.v - v_rhs(x)).abs());
        u_ode = u_ode.max((-u.d2 - PI * PI * u.v - u_rhs(x)).abs());
    }
    let ends =
        |f: &dyn Fn(Jet2) -> Jet2| f(Jet2::var(0.0)).d1.abs().max(f(Jet2::var(1.0)).d1.abs());
    let panels = 200;
    EigenfunctionResiduals {
        a,
        v_ode,
        v_boundary: ends(&|x| v_dot(a, x)),
        v_orthogonality: integrate(
            |x| v_dot(a, Jet2::var(x)).v * u0(Jet2::var(x)).v,
            0.0,
            1.0,
            panels,
        ),
        u_ode,
        u_boundary: ends(&|x| u_dot(a, x)),
        u_projection: integrate(
            |x| u_dot(a, Jet2::var(x)).v * u0(Jet2::var(x)).v,
            0.0,
            1.0,
            panels,
        ),
        u_projection_from_normalization: -a / 4.0,
        u_projection_displayed: a * integrate(|x| x * (PI * x).cos(), 0.0, 1.0, panels),
    }
}

/// Whether the optimizer minimizes or maximizes `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Mode::Min => a < b,
            Mode::Max => a > b,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Mode::Min),
            "max" => Ok(Mode::Max),
            _ => Err(Error::InvalidArgument(format!(
                "mode must be min or max, got {s:?}"
            ))),
        }
    }
}

/// Settings of [`optimize_f`].
#[derive(Clone, Debug, Serialize)]
pub struct OptimizeOptions {
    pub knots: usize,
    pub mode: Mode,
    pub restarts: usize,
    pub seed: u64,
    /// Start the first run from `h = 1` instead of a random profile.
    pub start_constant: bool,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
    /// Grid for the eigenvalue solves.
    pub elements: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            knots: 21,
            mode: Mode::Min,
            restarts: 20,
            seed: 0,
            start_constant: false,
            initial_step: 0.25,
            min_step: 1e-4,
            max_evaluations: 4000,
            elements: 512,
        }
    }
}

/// Outcome of one pattern search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchRun {
    pub start: String,
    pub best_value: f64,
    pub best_profile: Profile,
    /// Best value after each accepted move; monotone in the mode's direction.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// Best run over all restarts.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizeResult {
    pub mode: Mode,
    pub best_value: f64,
    pub best_profile: Profile,
    pub runs: Vec<SearchRun>,
}

fn evaluate(knots: &[f64], raw: &[f64], elements: usize) -> Option<(f64, Profile)> {
    let h = project_concave(knots, raw).ok()?;
    let f = sl1d::f_of_h(&h, elements).ok()?.f;
    f.is_finite().then_some((f, h))
}

/// Coordinate pattern search over knot ordinates; every trial point is
/// projected onto concave nonnegative profiles and normalized.
pub fn pattern_search(start: &Profile, label: &str, opts: &OptimizeOptions) -> Result<SearchRun> {
    let knots = uniform_knots(opts.knots);
    let mut x: Vec<f64> = knots.iter().map(|&k| start.eval(k)).collect();
    let (mut best, mut best_h) = evaluate(&knots, &x, opts.elements).ok_or_else(|| {
        Error::InvalidArgument(format!("start profile {label} cannot be evaluated"))
    })?;
    x = best_h.values().to_vec();
    let mut trace = vec![best];
    let mut evaluations = 1;
    let mut step = opts.initial_step;
    while step >= opts.min_step && evaluations < opts.max_evaluations {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                if evaluations >= opts.max_evaluations {
                    break;
                }
                let mut y = x.clone();
                y[i] += sign * step;
                evaluations += 1;
                if let Some((f, h)) = evaluate(&knots, &y, opts.elements) {
                    if opts.mode.better(f, best) {
                        best = f;
                        x = h.values().to_vec();
                        best_h = h;
                        trace.push(best);
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(SearchRun {
        start: label.into(),
        best_value: best,
        best_profile: best_h,
        trace,
        evaluations,
    })
}

/// Runs `restarts` pattern searches from random concave profiles (the first
/// from `h = 1` when requested), in parallel.
pub fn optimize_f(opts: &OptimizeOptions) -> Result<OptimizeResult> {
    if opts.knots < 5 {
        return Err(Error::InvalidArgument(format!(
            "optimizer needs at least 5 knots, got {}",
            opts.knots
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "optimizer needs at least one restart".into(),
        ));
    }
    let runs: Vec<SearchRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            if r == 0 && opts.start_constant {
                return pattern_search(&Profile::constant(1.0), "constant", opts);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let start = random_concave(&mut rng, 8, opts.mode == Mode::Min);
            pattern_search(&start, &format!("random stream {r}"), opts)
        })
        .collect::<Result<_>>()?;
    let best = runs
        .iter()
        .reduce(|a, b| {
            if opts.mode.better(b.best_value, a.best_value) {
                b
            } else {
                a
            }
        })
        .expect("at least one run");
    Ok(OptimizeResult {
        mode: opts.mode,
        best_value: best.best_value,
        best_profile: best.best_profile.clone(),
        runs: runs.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_direction(f: impl Fn(f64) -> f64) -> Profile {
        Profile::from_fn(uniform_knots(257), f).unwrap()
    }

    #[test]
    fn closed_forms_of_simple_directions() {
        let one = Profile::constant(1.0);
        assert!((sigma_dot_closed_form(&one) - PI * PI).abs() < 1e-12);
        assert!(mu_dot_closed_form(&one).abs() < 1e-12);
        let x = Profile::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!((sigma_dot_closed_form(&x) - PI * PI / 2.0).abs() < 1e-12);
        assert!(mu_dot_closed_form(&x).abs() < 1e-12);
        assert!(f_dot_closed_form(&x).abs() < 1e-14);
        let c = small_direction(|x| (2.0 * PI * x).cos());
        assert!((f_dot_closed_form(&c) + 0.5).abs() < 1e-4);
        assert!((f_dot_closed_form(&c) - f_dot_from_components(&c)).abs() < 1e-12);
    }

    #[test]
    fn richardson_removes_even_powers() {
        let q: Vec<f64> = FD_STEPS
            .iter()
            .map(|t| 2.0 + 3.0 * t * t + 7.0 * t.powi(4))
            .collect();
        assert!((richardson(&q) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn jet_differentiates() {
        let x = Jet2::var(0.3);
        let f = x.scale(2.0).sin() * x;
        assert!((f.d1 - ((0.6f64).sin() + 0.6 * (0.6f64).cos())).abs() < 1e-15);
        assert!((f.d2 - (4.0 * (0.6f64).cos() - 4.0 * 0.3 * (0.6f64).sin())).abs() < 1e-14);
    }

    #[test]
    fn eigenfunction_derivatives() {
        let r = eigenfunction_derivative_residuals(1.0);
        assert!(r.consistent(1e-10), "{r:?}");
        assert!((r.u_projection_displayed + 2.0 / (PI * PI)).abs() < 1e-12);
        assert!((r.u_projection - r.u_projection_displayed).abs() > 0.04);
    }

    #[test]
    fn second_derivative_constants() {
        assert!((sigma_ddot_linear(1.0) + 0.858_700_550_136_).abs() < 1e-9);
        assert!((f_ddot_linear(1.0) - 0.238_986_331_598).abs() < 1e-11);
        assert_eq!(f_ddot_linear(2.0), 4.0 * f_ddot_linear(1.0));
        // the combination of the component formulas
        assert!(
            (f_ddot_linear(1.0) - (mu_ddot_linear(1.0) - sigma_ddot_linear(1.0)) / (PI * PI)).abs()
                < 1e-15
        );
    }

    #[test]
    fn linear_direction_is_stationary() {
        let phi = Profile::new(vec![0.0, 1.0], vec![0.2, 0.5]).unwrap();
        let r = first_variation_f(&phi, "B + A x").unwrap();
        assert!(r.finite_difference.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn first_variations_match_finite_differences() {
        let phi = small_direction(|x| 0.3 * (2.0 * PI * x).cos());
        for r in [
            first_variation_sigma(&phi, "cos").unwrap(),
            first_variation_mu(&phi, "cos").unwrap(),
            first_variation_f(&phi, "cos").unwrap(),
        ] {
            assert!(r.rel_error < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn second_variations_match_finite_differences() {
        let [s, m, f] = second_variation_f_linear(1.0).unwrap();
        assert!(s.rel_error < 1e-4, "{s:?}");
        assert!(m.rel_error < 1e-4, "{m:?}");
        assert!(f.rel_error < 1e-4, "{f:?}");
        assert!(second_variation_f_linear(0.0).is_err());
    }

    #[test]
    fn optimizer_trace_is_monotone() {
        let opts = OptimizeOptions {
            restarts: 2,
            knots: 7,
            max_evaluations: 150,
            ..Default::default()
        };
        let r = optimize_f(&opts).unwrap();
        for run in &r.runs {
            assert!(run.trace.windows(2).all(|w| w[1] < w[0]));
            assert!(run.best_profile.is_admissible());
        }
        assert!(r.best_value >= PI * PI / 12.0 - 1e-3);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("min".parse::<Mode>().unwrap(), Mode::Min);
        assert!("up".parse::<Mode>().is_err());
    }

    #[test]
    fn oversized_direction_rejected() {
        assert!(first_variation_sigma(&Profile::constant(1000.0), "big").is_err());
    }
}
