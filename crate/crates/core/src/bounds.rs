//! Explicit constants of the two-sided bound on `F`.
//!
//! The upper bound rests on the quartic
//! `P_tau(y) = tau y^4 / 4 - 2 y^3 + 5 tau y^2 - 4 tau^2 y + tau^3`, which
//! constrains `y = 2r/D` for a convex body with `tau = w/D`, and on
//! `g(tau) = 1 / (2 sqrt(1 - tau^2) + 2 tau asin(tau))`, an upper bound for
//! `D/P`. With `y_2(tau)` the second root of `P_tau`,
//! `F <= 2 (1 + K)` where `K = max_tau 2 pi tau g(tau) / y_2(tau)`.
//!
//! The quartic is evaluated as `(tau - y)^2 (tau - 2y) + tau y^4 / 4`, an
//! identity that avoids the cancellation of the expanded form for small
//! `tau` (where the value at `tau + tau^2/2` is of order `tau^6`).

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::geom2d::GeometryFunctionals;
use crate::{Error, Result};

/// Smallest `tau` on the evaluation range of `f`.
pub const TAU_MIN: f64 = 1e-6;
/// Largest `tau` on the evaluation range of `f`.
pub const TAU_MAX: f64 = 1.0 - 1e-9;

pub fn p_tau(tau: f64, y: f64) -> f64 {
    let a = tau - y;
    a * a * (tau - 2.0 * y) + 0.25 * tau * y.powi(4)
}

/// `|P_tau(y)|` relative to the sum of magnitudes of its expanded terms.
pub fn relative_residual(tau: f64, y: f64) -> f64 {
    p_tau(tau, y).abs() / term_scale(tau, y)
}

/// Sum of the magnitudes of the expanded terms of `P_tau(y)`.
fn term_scale(tau: f64, y: f64) -> f64 {
    0.25 * tau * y.powi(4) + 2.0 * y.powi(3) + 5.0 * tau * y * y + 4.0 * tau * tau * y + tau.powi(3)
}

/// Cauchy bound on the moduli of the roots of `P_tau`.
pub fn root_bound(tau: f64) -> f64 {
    let lead = 0.25 * tau;
    1.0 + [2.0, 5.0 * tau, 4.0 * tau * tau, tau.powi(3)]
        .iter()
        .map(|c| c / lead)
        .fold(0.0, f64::max)
}

/// Which set of separating points isolates the roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BracketCase {
    /// `tau <= sqrt(3)/2`: separators `2 tau / 3` and `tau + tau^2/2`.
    SmallTau,
    /// `sqrt(3)/2 <= tau <= 0.9`: separators `1/2` and `tau + tau^2/2`.
    Middle,
    /// `tau >= 0.9`: separators `2 - sqrt 2` and `tau + tau^2/2`.
    NearOne,
}

impl BracketCase {
    pub fn applies(self, tau: f64) -> bool {
        let s = 0.75f64.sqrt();
        match self {
            BracketCase::SmallTau => tau <= s,
            BracketCase::Middle => (s..=0.9).contains(&tau),
            BracketCase::NearOne => tau >= 0.9,
        }
    }

    /// The case used by default for `tau`. At `tau = sqrt(3)/2` the first
    /// small-`tau` separator is itself a root, so that point goes to `Middle`.
    pub fn for_tau(tau: f64) -> Self {
        if tau < 0.75f64.sqrt() {
            BracketCase::SmallTau
        } else if tau <= 0.9 {
            BracketCase::Middle
        } else {
            BracketCase::NearOne
        }
    }

    /// Points `0 < s1 < s2 < s3 < s4` with `P > 0, < 0, > 0, < 0, > 0` on them
    /// (preceded by 0).
    pub fn separators(self, tau: f64) -> [f64; 5] {
        let first = match self {
            BracketCase::SmallTau => 2.0 * tau / 3.0,
            BracketCase::Middle => 0.5,
            BracketCase::NearOne => 2.0 - SQRT_2,
        };
        [
            0.0,
            first,
            tau + 0.5 * tau * tau,
            2.0 + SQRT_2,
            root_bound(tau),
        ]
    }
}

/// The four positive roots of `P_tau`.
#[derive(Clone, Debug, Serialize)]
pub struct QuarticRoots {
    pub tau: f64,
    pub case: BracketCase,
    pub roots: [f64; 4],
    pub brackets: [(f64, f64); 4],
    /// Largest relative residual over the roots.
    pub residual: f64,
}

/// Residual tolerance relative to the term magnitudes.
pub const RESIDUAL_TOL: f64 = 1e-11;

/// Roots with the default case, falling back to any other case covering
/// `tau` when a separator lands on a root.
pub fn quartic_roots(tau: f64) -> Result<QuarticRoots> {
    let first = BracketCase::for_tau(tau);
    let primary = quartic_roots_with(tau, first);
    if primary.is_ok() {
        return primary;
    }
    [
        BracketCase::SmallTau,
        BracketCase::Middle,
        BracketCase::NearOne,
    ]
    .into_iter()
    .filter(|&c| c != first && c.applies(tau))
    .find_map(|c| quartic_roots_with(tau, c).ok())
    .map_or(primary, Ok)
}

/// Roots isolated by the separators of `case`; bisection runs to adjacent
/// floating-point numbers.
pub fn quartic_roots_with(tau: f64, case: BracketCase) -> Result<QuarticRoots> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} outside (0, 1)"
        )));
    }
    if !case.applies(tau) {
        return Err(Error::InvalidArgument(format!(
            "bracket case {case:?} does not cover tau = {tau}"
        )));
    }
    let s = case.separators(tau);
    let mut roots = [0.0; 4];
    let mut brackets = [(0.0, 0.0); 4];
    let mut residual = 0.0_f64;
    for k in 0..4 {
        let (a, b) = (s[k], s[k + 1]);
        let (fa, fb) = (p_tau(tau, a), p_tau(tau, b));
        let expect_positive_left = k % 2 == 0;
        if !((fa > 0.0) == expect_positive_left
            && (fb > 0.0) != expect_positive_left
            && fa != 0.0
            && fb != 0.0)
        {
            return Err(Error::Invariant(format!(
                "no sign change of P_tau on [{a}, {b}] at tau = {tau} ({fa:.3e}, {fb:.3e}); root bracket fails"
            )));
        }
        let y = bisect_full(|y| p_tau(tau, y), a, b);
        roots[k] = y;
        brackets[k] = (a, b);
        residual = residual.max(relative_residual(tau, y));
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::Invariant(format!(
            "quartic residual {residual:.3e} above tolerance at tau = {tau}"
        )));
    }
    Ok(QuarticRoots {
        tau,
        case,
        roots,
        brackets,
        residual,
    })
}

fn bisect_full(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let left_positive = f(a) > 0.0;
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return if f(a).abs() <= f(b).abs() { a } else { b };
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == left_positive {
            a = m;
        } else {
            b = m;
        }
    }
}

/// `1 / (2 sqrt(1 - tau^2) + 2 tau asin(tau))`.
pub fn g_of_tau(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    1.0 / (2.0 * (1.0 - t * t).sqrt() + 2.0 * t * t.asin())
}

/// `2 pi tau g(tau) / y_2(tau)`.
pub fn f_of_tau(tau: f64) -> Result<f64> {
    let r = quartic_roots(tau)?;
    Ok(2.0 * PI * tau * g_of_tau(tau) / r.roots[1])
}

/// Per-`tau` record of a lemma verification sweep.
#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub tau: f64,
    pub roots: [f64; 4],
    pub f: f64,
}

/// Outcome of checking the bracket signs and root membership on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub grid: usize,
    /// Number of (tau, case) pairs checked, counting both cases on overlaps.
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest disagreement between the two bracket sets where both apply.
    pub overlap_disagreement: f64,
    /// Smallest value of `P_tau` sampled on the intervals where it must be
    /// nonnegative, relative to the term magnitudes.
    pub min_nonnegative_sample: f64,
    pub rows: Vec<GridRow>,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Uniform grid of `n` points on `[TAU_MIN, TAU_MAX]`.
pub fn tau_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| TAU_MIN + (TAU_MAX - TAU_MIN) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Checks, for every `tau` on the grid and every bracket case covering it:
/// the sign pattern at the separators, root ordering, root membership of
/// `y_2`, agreement between cases on overlaps, and `P_tau >= 0` sampled at
/// 100 points on `[0, y1]`, `[y2, y3]` and `[y4, 2 y4]`.
pub fn verify_lemma_brackets(n: usize) -> LemmaCheck {
    type PointCheck = (usize, Vec<String>, f64, f64, Option<GridRow>);
    let results: Vec<PointCheck> = tau_grid(n)
        .into_par_iter()
        .map(|tau| {
            let mut failures = Vec::new();
            let mut checks = 0;
            let mut found: Vec<QuarticRoots> = Vec::new();
            for case in [
                BracketCase::SmallTau,
                BracketCase::Middle,
                BracketCase::NearOne,
            ] {
                if !case.applies(tau) {
                    continue;
                }
                checks += 1;
                match quartic_roots_with(tau, case) {
                    Ok(r) => found.push(r),
                    Err(e) => failures.push(format!("tau = {tau}, {case:?}: {e}")),
                }
            }
            let mut disagreement = 0.0_f64;
            let mut min_sample = f64::INFINITY;
            let mut row = None;
            if let Some(r) = found.first() {
                for other in &found[1..] {
                    for k in 0..4 {
                        disagreement =
                            disagreement.max((r.roots[k] - other.roots[k]).abs() / r.roots[k]);
                    }
                }
                let [y1, y2, y3, y4] = r.roots;
                if !(y1 < y2 && y2 < y3 && y3 < y4) {
                    failures.push(format!("tau = {tau}: roots not ordered {:?}", r.roots));
                }
                let member = match BracketCase::for_tau(tau) {
                    BracketCase::SmallTau => y2 > 2.0 * tau / 3.0 && y2 < tau + 0.5 * tau * tau,
                    BracketCase::Middle => y2 > 0.5,
                    BracketCase::NearOne => y2 > 2.0 - SQRT_2,
                };
                if !member {
                    failures.push(format!("tau = {tau}: y2 = {y2} outside its lemma interval"));
                }
                for (a, b) in [(0.0, y1), (y2, y3), (y4, 2.0 * y4)] {
                    for i in 0..=100 {
                        let y = a + (b - a) * i as f64 / 100.0;
                        let p = p_tau(tau, y);
                        let rel = p / term_scale(tau, y);
                        min_sample = min_sample.min(rel);
                        if rel < -RESIDUAL_TOL {
                            failures.push(format!(
                                "tau = {tau}: P_tau({y}) = {p:.3e} < 0 on a nonnegative interval"
                            ));
                        }
                    }
                }
                row = Some(GridRow {
                    tau,
                    roots: r.roots,
                    f: 2.0 * PI * tau * g_of_tau(tau) / y2,
                });
            }
            (checks, failures, disagreement, min_sample, row)
        })
        .collect();

    let mut check = LemmaCheck {
        grid: n,
        checks: 0,
        failures: Vec::new(),
        overlap_disagreement: 0.0,
        min_nonnegative_sample: f64::INFINITY,
        rows: Vec::with_capacity(n),
    };
    for (c, f, d, m, row) in results {
        check.checks += c;
        check.failures.extend(f);
        check.overlap_disagreement = check.overlap_disagreement.max(d);
        check.min_nonnegative_sample = check.min_nonnegative_sample.min(m);
        check.rows.extend(row);
    }
    check
}

/// `K` and its maximizer.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantK {
    pub k: f64,
    pub tau_star: f64,
    pub grid: usize,
    /// `2 (1 + K)`.
    pub upper_bound: f64,
}

/// `K = max f` on `[TAU_MIN, TAU_MAX]`: grid argmax, then golden-section
/// search on the neighbouring cells down to `tol` in `tau`.
pub fn constant_k(grid: usize, tol: f64) -> Result<ConstantK> {
    if grid < 100 {
        return Err(Error::InvalidArgument(format!(
            "K needs a grid of at least 100 points, got {grid}"
        )));
    }
    let taus = tau_grid(grid);
    let values: Vec<f64> = taus
        .par_iter()
        .map(|&t| f_of_tau(t))
        .collect::<Result<_>>()?;
    let (imax, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let mut a = taus[imax.saturating_sub(1)];
    let mut b = taus[(imax + 1).min(grid - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f_of_tau(c)?;
    let mut fd = f_of_tau(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f_of_tau(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f_of_tau(d)?;
        }
    }
    let mut best = (values[imax], taus[imax]);
    for (v, t) in [(fc, c), (fd, d)] {
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(ConstantK {
        k: best.0,
        tau_star: best.1,
        grid,
        upper_bound: 2.0 * (1.0 + best.0),
    })
}

/// The lower constant obtained by matching the two branch bounds.
#[derive(Clone, Debug, Serialize)]
pub struct LowerConstant {
    /// `pi^2 / (6 cbrt 18)`.
    pub value: f64,
    /// Matching point `delta = cbrt 18`.
    pub delta: f64,
    /// `pi^2 / (6 delta)`, the bound for large `delta`.
    pub branch_large: f64,
    /// `delta^2 pi^2 / 108`, the bound for small `delta`.
    pub branch_small: f64,
    /// `|branch_large - branch_small|`.
    pub mismatch: f64,
    /// Minimum of the isoperimetric-type ratio entering the small-`delta`
    /// branch, attained by the equilateral triangle.
    pub isoperimetric_min: f64,
    /// The small-branch coefficient is half the isoperimetric minimum.
    pub factor_consistent: bool,
}

pub fn lower_bound_constant() -> LowerConstant {
    let delta = 18f64.cbrt();
    let branch_large = PI * PI / (6.0 * delta);
    let branch_small = delta * delta * PI * PI / 108.0;
    LowerConstant {
        value: PI * PI / (6.0 * delta),
        delta,
        branch_large,
        branch_small,
        mismatch: (branch_large - branch_small).abs(),
        isoperimetric_min: 1.0 / 54.0,
        factor_consistent: (2.0 * branch_small / (delta * delta * PI * PI) - 1.0 / 54.0).abs()
            <= 1e-15,
    }
}

/// `2 (1 + pi w D / (r P))` for one convex body.
pub fn per_domain_upper_bound(g: &GeometryFunctionals) -> Result<f64> {
    if !(g.inradius > 0.0 && g.perimeter > 0.0 && g.width > 0.0 && g.diameter > 0.0) {
        return Err(Error::Degenerate(format!(
            "bound needs positive r, P, w, D; got r = {}, P = {}, w = {}, D = {}",
            g.inradius, g.perimeter, g.width, g.diameter
        )));
    }
    Ok(2.0 * (1.0 + PI * g.width * g.diameter / (g.inradius * g.perimeter)))
}

/// Position of `y = 2r/D` relative to the roots of `P_tau`, `tau = w/D`.
#[derive(Clone, Debug, Serialize)]
pub struct SantaloCheck {
    pub tau: f64,
    pub y: f64,
    pub p_value: f64,
    pub y1: f64,
    pub y2: f64,
    /// `P_tau(y) >= 0` up to the residual tolerance.
    pub admissible: bool,
    /// `y >= y_2(tau)`, the branch the upper-bound argument relies on.
    pub above_y2: bool,
}

/// Empirical check of the `(w, D, r)` constraint; `tau` is clamped into the
/// root-isolation range.
pub fn santalo_check(g: &GeometryFunctionals) -> Result<SantaloCheck> {
    let tau = (g.width / g.diameter).clamp(TAU_MIN, TAU_MAX);
    let y = 2.0 * g.inradius / g.diameter;
    let r = quartic_roots(tau)?;
    let p = p_tau(tau, y);
    let slack = 1e-9;
    Ok(SantaloCheck {
        tau,
        y,
        p_value: p,
        y1: r.roots[0],
        y2: r.roots[1],
        admissible: p >= -RESIDUAL_TOL * term_scale(tau, y),
        above_y2: y >= r.roots[1] * (1.0 - slack),
    })
}
