//! Weighted one-dimensional eigenvalue problems generated by a profile `h`.
//!
//! * Neumann type: `-(h u')' = mu h u` on `(0, 1)`,
//! * Steklov type: `-(h v')' = sigma v` on `(0, 1)`,
//!
//! both with the natural conditions `h u' = 0` at the endpoints. They are
//! discretized with continuous piecewise-linear elements on a uniform grid.
//! Because `h` is itself piecewise linear every matrix entry is integrated
//! exactly, including when `h` vanishes at an endpoint. The constant mode is
//! removed by working on the mean-zero subspace of the relevant mass inner
//! product and the first nontrivial eigenvalue is found by inverse iteration
//! on the grounded tridiagonal stiffness matrix.
//!
//! The P1 eigenvalue error is `O(H^2)`; [`mu1`] and [`sigma1`] return the
//! Richardson combination of the runs on `N/2` and `N` cells, which removes
//! the leading term. [`solve_galerkin`] exposes the raw discrete eigenvalue.
//!
//! [`sigma1_kernel_oracle`] computes the Steklov-type eigenvalue a second way,
//! through the integral operator with kernel
//! `g(x, y) = int_0^min(x,y) t/h + int_max(x,y)^1 (1 - t)/h`, which inverts
//! `-(h v')'` on mean-zero functions.

use serde::Serialize;

use crate::linalg::SymTridiagonal;
use crate::profiles::Profile;
use crate::{Error, Result};

/// Smallest accepted number of cells.
pub const MIN_ELEMENTS: usize = 8;

/// Default number of cells.
pub const DEFAULT_ELEMENTS: usize = 2048;

/// Default number of midpoints used by the kernel oracle.
pub const DEFAULT_ORACLE_POINTS: usize = 4000;

const MAX_ITER: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProblemKind {
    /// Weight `h` on both sides: `mu_1(h)`.
    NeumannWeighted,
    /// Weight `h` on the stiffness side only: `sigma_1(h)`.
    SteklovWeighted,
}

/// First nontrivial eigenpair of a discretized weighted problem.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub kind: ProblemKind,
    /// Reported eigenvalue (extrapolated unless produced by [`solve_galerkin`]).
    pub eigenvalue: f64,
    /// Discrete eigenvalue on the finest grid.
    pub galerkin_eigenvalue: f64,
    /// Nodal values on the finest grid, unit norm in the mass inner product.
    pub eigenvector: Vec<f64>,
    /// Relative algebraic residual on the finest grid.
    pub residual: f64,
    pub dofs: usize,
    pub elements: usize,
    pub iterations: usize,
}

/// Assembled stiffness and mass matrices.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub stiffness: SymTridiagonal,
    pub mass: SymTridiagonal,
}

fn check_weight(h: &Profile) -> Result<()> {
    if let Some(v) = h.values().iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidArgument(format!("negative weight value {v}")));
    }
    if !(h.integral() > 0.0) {
        return Err(Error::Singular("profile is identically zero".into()));
    }
    Ok(())
}

/// Assembles the P1 pencil of `kind` for weight `h` on `elements` cells.
pub fn assemble(h: &Profile, kind: ProblemKind, elements: usize) -> Result<Pencil> {
    if elements < MIN_ELEMENTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_ELEMENTS} elements, got {elements}"
        )));
    }
    check_weight(h)?;
    let n = elements + 1;
    let cell = 1.0 / elements as f64;
    let node = |i: usize| if i == elements { 1.0 } else { i as f64 * cell };
    let mut stiffness = SymTridiagonal::zeros(n);
    let mut mass = SymTridiagonal::zeros(n);
    for e in 0..elements {
        let (a, b) = (node(e), node(e + 1));
        let len = b - a;
        let w = h.integral_over(a, b) / (len * len);
        stiffness.add_block(e, w, -w, w);
        match kind {
            ProblemKind::SteklovWeighted => {
                mass.add_block(e, len / 3.0, len / 6.0, len / 3.0);
            }
            ProblemKind::NeumannWeighted => {
                // int h phi_a phi_b: cubic on each linear piece of h, Simpson is exact
                let (mut maa, mut mab, mut mbb) = (0.0, 0.0, 0.0);
                for w in h.breakpoints(a, b).windows(2) {
                    let (s0, s1) = (w[0], w[1]);
                    let sm = 0.5 * (s0 + s1);
                    let simpson =
                        |f: &dyn Fn(f64) -> f64| (s1 - s0) / 6.0 * (f(s0) + 4.0 * f(sm) + f(s1));
                    let pa = |x: f64| (b - x) / len;
                    let pb = |x: f64| (x - a) / len;
                    maa += simpson(&|x| h.eval(x) * pa(x) * pa(x));
                    mab += simpson(&|x| h.eval(x) * pa(x) * pb(x));
                    mbb += simpson(&|x| h.eval(x) * pb(x) * pb(x));
                }
                mass.add_block(e, maa, mab, mbb);
            }
        }
    }
    Ok(Pencil { stiffness, mass })
}

/// Raw Galerkin eigenpair on `elements` cells, no extrapolation.
pub fn solve_galerkin(h: &Profile, kind: ProblemKind, elements: usize) -> Result<SpectralResult> {
    let Pencil { stiffness, mass } = assemble(h, kind, elements)?;
    let n = stiffness.dim();
    let grounded = stiffness.drop_first().factor()?;

    let ones = vec![1.0; n];
    let m_ones = mass.mul_vec(&ones);
    let ones_norm: f64 = m_ones.iter().sum();
    let deflate = |x: &mut [f64]| {
        let c = m_ones.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() / ones_norm;
        for v in x.iter_mut() {
            *v -= c;
        }
    };
    let normalize = |x: &mut [f64]| {
        let mx = mass.mul_vec(x);
        let nrm = mx
            .iter()
            .zip(x.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .sqrt();
        for v in x.iter_mut() {
            *v /= nrm;
        }
    };

    let cell = 1.0 / elements as f64;
    let mut x: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * i as f64 * cell).cos())
        .collect();
    deflate(&mut x);
    normalize(&mut x);

    let mut lambda = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for iter in 1..=MAX_ITER {
        let b = mass.mul_vec(&x);
        let mut rhs = b[1..].to_vec();
        grounded.solve_in_place(&mut rhs);
        let mut y = Vec::with_capacity(n);
        y.push(0.0);
        y.extend_from_slice(&rhs);
        deflate(&mut y);
        normalize(&mut y);

        let ay = stiffness.mul_vec(&y);
        let my = mass.mul_vec(&y);
        // y^T K y as a sum of positive cell energies; the expanded form cancels
        // terms of size N^2 and leaves a rounding floor near 1e-11
        let next: f64 = stiffness
            .off
            .iter()
            .zip(y.windows(2))
            .map(|(w, d)| -w * (d[1] - d[0]).powi(2))
            .sum();
        let r: f64 = ay
            .iter()
            .zip(&my)
            .map(|(a, b)| (a - next * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = norm(&ay) + next.abs() * norm(&my);
        residual = r / scale;
        let change = (next - lambda).abs();
        lambda = next;
        x = y;
        let converged = residual <= RESIDUAL_TOL && (change <= 1e-13 * lambda.abs() || iter >= 200);
        // weights vanishing at an end put a rounding floor near the tolerance
        let stalled =
            iter >= 200 && change <= 1e-12 * lambda.abs() && residual <= 1e2 * RESIDUAL_TOL;
        if iter > 2 && (converged || stalled) {
            return Ok(SpectralResult {
                kind,
                eigenvalue: lambda,
                galerkin_eigenvalue: lambda,
                eigenvector: x,
                residual,
                dofs: n,
                elements,
                iterations: iter,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Galerkin eigenvalue on `elements` cells, Richardson-extrapolated with the
/// run on `elements / 2` cells.
pub fn solve(h: &Profile, kind: ProblemKind, elements: usize) -> Result<SpectralResult> {
    if !elements.is_multiple_of(2) || elements / 2 < MIN_ELEMENTS {
        return Err(Error::InvalidArgument(format!(
            "extrapolated solve needs an even element count >= {}, got {elements}",
            2 * MIN_ELEMENTS
        )));
    }
    let fine = solve_galerkin(h, kind, elements)?;
    let coarse = solve_galerkin(h, kind, elements / 2)?;
    let eigenvalue = (4.0 * fine.galerkin_eigenvalue - coarse.galerkin_eigenvalue) / 3.0;
    Ok(SpectralResult {
        eigenvalue,
        iterations: fine.iterations + coarse.iterations,
        ..fine
    })
}

/// `mu_1(h)`: first nonzero eigenvalue of `-(h u')' = mu h u`.
pub fn mu1(h: &Profile, elements: usize) -> Result<SpectralResult> {
    solve(h, ProblemKind::NeumannWeighted, elements)
}

/// `sigma_1(h)`: first nonzero eigenvalue of `-(h v')' = sigma v`.
pub fn sigma1(h: &Profile, elements: usize) -> Result<SpectralResult> {
    solve(h, ProblemKind::SteklovWeighted, elements)
}

/// `F(h) = mu_1(h) int h / sigma_1(h)` with its ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalOfProfile {
    pub mu1: f64,
    pub sigma1: f64,
    pub integral: f64,
    pub f: f64,
    pub mu1_residual: f64,
    pub sigma1_residual: f64,
    pub elements: usize,
}

/// Evaluates `F(h)` with both eigenvalues on the same grid.
pub fn f_of_h(h: &Profile, elements: usize) -> Result<FunctionalOfProfile> {
    let mu = mu1(h, elements)?;
    let sigma = sigma1(h, elements)?;
    let integral = h.integral();
    Ok(FunctionalOfProfile {
        mu1: mu.eigenvalue,
        sigma1: sigma.eigenvalue,
        integral,
        f: mu.eigenvalue * integral / sigma.eigenvalue,
        mu1_residual: mu.residual,
        sigma1_residual: sigma.residual,
        elements,
    })
}

/// Result of [`sigma1_kernel_oracle`].
#[derive(Clone, Debug, Serialize)]
pub struct KernelOracle {
    /// `1 / lambda_max` of the projected kernel operator.
    pub eigenvalue: f64,
    pub points: usize,
    pub iterations: usize,
}

/// `int_0^1 (n0 + n1 s) / (ha + (hb - ha) s) ds`, exact.
///
/// Returns `None` when the integral diverges (zero weight where the numerator
/// does not vanish).
fn ratio_integral(n0: f64, n1: f64, ha: f64, hb: f64) -> Option<f64> {
    let d = hb - ha;
    let big = ha.max(hb);
    if big <= 0.0 {
        return None;
    }
    if ha > 0.0 && d.abs() <= 0.05 * ha {
        let r = d / ha;
        let mut pow = 1.0;
        let mut acc = 0.0;
        for k in 0..40 {
            acc += pow * (n0 / (k as f64 + 1.0) + n1 / (k as f64 + 2.0));
            pow *= -r;
        }
        return Some(acc / ha);
    }
    let numer_scale = n0.abs() + n1.abs();
    if ha == 0.0 || hb == 0.0 {
        let at_zero = if ha == 0.0 { n0 } else { n0 + n1 };
        if at_zero.abs() > 1e-12 * numer_scale.max(1e-300) {
            return None;
        }
        return Some(n1 / d);
    }
    let i0 = (d / ha).ln_1p() / d;
    Some(n1 / d + (n0 - n1 * ha / d) * i0)
}

/// Cumulative integrals of `t / h` from 0 and of `(1 - t) / h` up to 1 at the
/// requested sorted abscissae.
fn kernel_primitives(h: &Profile, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut pts: Vec<f64> = h.knots().iter().chain(xs.iter()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    // piece integrals between consecutive breakpoints; pieces outside
    // [min xs, max xs] are skipped on the side where they are not needed, since
    // a weight vanishing at an end makes them diverge there
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let mut left = Vec::with_capacity(pts.len() - 1);
    let mut right = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let (ha, hb) = (h.eval(a), h.eval(b));
        let diverge = || Error::Invariant(format!("kernel quadrature diverges on [{a}, {b}]"));
        // t = a + len s
        left.push(if b <= hi {
            len * ratio_integral(a, len, ha, hb).ok_or_else(diverge)?
        } else {
            0.0
        });
        right.push(if a >= lo {
            len * ratio_integral(1.0 - a, -len, ha, hb).ok_or_else(diverge)?
        } else {
            0.0
        });
    }
    let mut phi_at = vec![0.0; pts.len()];
    for i in 1..pts.len() {
        phi_at[i] = phi_at[i - 1] + left[i - 1];
    }
    let mut psi_at = vec![0.0; pts.len()];
    for i in (0..pts.len() - 1).rev() {
        psi_at[i] = psi_at[i + 1] + right[i];
    }
    let lookup = |x: f64| {
        pts.binary_search_by(|p| p.total_cmp(&x))
            .expect("abscissa inserted")
    };
    let phi = xs.iter().map(|&x| phi_at[lookup(x)]).collect();
    let psi = xs.iter().map(|&x| psi_at[lookup(x)]).collect();
    Ok((phi, psi))
}

/// `sigma_1(h)` from the Green-kernel integral operator discretized by the
/// midpoint rule on `points` cells.
///
/// The operator `G` is applied in `O(points)` per product using prefix sums
/// of the separable kernel, restricted to mean-zero vectors, and its largest
/// eigenvalue is found by power iteration.
pub fn sigma1_kernel_oracle(h: &Profile, points: usize) -> Result<KernelOracle> {
    if points < 16 {
        return Err(Error::InvalidArgument(
            "kernel oracle needs at least 16 points".into(),
        ));
    }
    check_weight(h)?;
    let n = points;
    let w = 1.0 / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * w).collect();
    let (phi, psi) = kernel_primitives(h, &xs)?;

    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        for x in v.iter_mut() {
            *x -= mean;
        }
    };
    // (G v)_i = sum_{j<=i} phi_j v_j + psi_i sum_{j<i} v_j + phi_i sum_{j>i} v_j + sum_{j>=i} psi_j v_j
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        let mut acc_phi = 0.0;
        let mut acc_v = 0.0;
        for i in 0..n {
            acc_phi += phi[i] * v[i];
            out[i] = acc_phi + psi[i] * acc_v;
            acc_v += v[i];
        }
        let mut acc_psi = 0.0;
        let mut acc_v = 0.0;
        for i in (0..n).rev() {
            acc_psi += psi[i] * v[i];
            out[i] += acc_psi + phi[i] * acc_v;
            acc_v += v[i];
        }
        out.iter_mut().for_each(|x| *x *= w);
        out
    };

    let mut v: Vec<f64> = xs
        .iter()
        .map(|&x| (std::f64::consts::PI * x).cos())
        .collect();
    project(&mut v);
    let mut lambda = 0.0;
    for iter in 1..=MAX_ITER {
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut gv = apply(&v);
        project(&mut gv);
        let next: f64 = gv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let change = (next - lambda).abs();
        lambda = next;
        v = gv;
        if iter > 3 && change <= 1e-15 * lambda.abs() {
            return Ok(KernelOracle {
                eigenvalue: 1.0 / lambda,
                points,
                iterations: iter,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_profile_gives_pi_squared() {
        let h = Profile::constant(1.0);
        let mu = mu1(&h, 2048).unwrap();
        let sigma = sigma1(&h, 2048).unwrap();
        assert!(
            (mu.eigenvalue - PI * PI).abs() < 1e-8,
            "{}",
            mu.eigenvalue - PI * PI
        );
        assert!((sigma.eigenvalue - PI * PI).abs() < 1e-8);
        assert!(mu.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn raw_galerkin_matches_discrete_formula() {
        let cells = 64;
        let r =
            solve_galerkin(&Profile::constant(1.0), ProblemKind::SteklovWeighted, cells).unwrap();
        let hh = 1.0 / cells as f64;
        let c = (PI * hh).cos();
        let exact = 6.0 / (hh * hh) * (1.0 - c) / (2.0 + c);
        assert!((r.eigenvalue - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn eigenvector_is_mass_normalized_and_mean_zero() {
        let h = Profile::triangular(0.3).unwrap();
        let r = solve_galerkin(&h, ProblemKind::NeumannWeighted, 256).unwrap();
        let p = assemble(&h, ProblemKind::NeumannWeighted, 256).unwrap();
        let mx = p.mass.mul_vec(&r.eigenvector);
        let nrm: f64 = mx.iter().zip(&r.eigenvector).map(|(a, b)| a * b).sum();
        let mean: f64 = mx.iter().sum();
        assert!((nrm - 1.0).abs() < 1e-12);
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn scale_invariance_of_f() {
        let h = Profile::parabolic_star(201).unwrap();
        let base = f_of_h(&h, 512).unwrap().f;
        for k in [0.5, 2.0, 10.0] {
            let f = f_of_h(&h.scaled(k), 512).unwrap().f;
            assert!((f - base).abs() < 1e-10, "k={k}: {f} vs {base}");
        }
    }

    #[test]
    fn errors() {
        let h = Profile::constant(1.0);
        assert!(mu1(&h, 4).is_err());
        assert!(mu1(&h, 33).is_err());
        assert!(matches!(
            mu1(&Profile::constant(0.0), 64),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn ratio_integral_cases() {
        // int_0^1 s / (2 s) = 1/2
        assert!((ratio_integral(0.0, 1.0, 0.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        // int_0^1 1 / (1 + s) = ln 2
        assert!((ratio_integral(1.0, 0.0, 1.0, 2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        // nearly constant weight uses the series
        let exact = 1e-3f64.ln_1p() / 1e-3;
        assert!((ratio_integral(1.0, 0.0, 1.0, 1.0 + 1e-3).unwrap() - exact).abs() < 1e-14);
        // divergent: 1 / s near 0
        assert!(ratio_integral(1.0, 0.0, 0.0, 1.0).is_none());
    }

    #[test]
    fn kernel_oracle_constant_profile() {
        let k = sigma1_kernel_oracle(&Profile::constant(1.0), 2000).unwrap();
        assert!((k.eigenvalue - PI * PI).abs() < 1e-4, "{}", k.eigenvalue);
    }
}
