//! Acceptance criteria 1-9. Runs without the libtest harness so each
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_lab::bessel::{j0_first_zero, j1_prime_first_zero, mu1_tent, sigma1_tent};
use spectral_lab::bounds::{constant_k, lower_bound_constant, verify_lemma_brackets};
use spectral_lab::diagram::{
    conjecture_report, run_campaign, x_limit, y_limit, Campaign, Family, MeshPolicy,
};
use spectral_lab::fem2d::{f_of_domain, thin_sweep, ThinMeshOptions};
use spectral_lab::geom2d::{named, NamedShape};
use spectral_lab::profiles::{random_concave, Profile};
use spectral_lab::sl1d::{
    f_of_h, mu1, sigma1, sigma1_kernel_oracle, DEFAULT_ELEMENTS, DEFAULT_ORACLE_POINTS,
};
use spectral_lab::variations::{
    eigenfunction_derivative_residuals, f_ddot_linear, first_variation_f, first_variation_mu,
    first_variation_sigma, second_variation_f_linear,
};

type Outcome = spectral_lab::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

/// Collects failed sub-checks with their measured values.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failed.push(what);
        }
    }

    fn finish(self) -> (bool, String) {
        if self.failed.is_empty() {
            (true, self.notes.join("; "))
        } else {
            (false, self.failed.join("; "))
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn one_d_cornerstones() -> Outcome {
    let mut c = Checks::default();
    let star = Profile::parabolic_star(2001)?;
    let s = sigma1(&star, DEFAULT_ELEMENTS)?.eigenvalue;
    c.check(
        (s - 12.0).abs() <= 1e-4,
        format!("sigma1(6x(1-x)) - 12 = {:.2e}", s - 12.0),
    );
    let one = Profile::constant(1.0);
    let m = mu1(&one, DEFAULT_ELEMENTS)?.eigenvalue;
    let s1 = sigma1(&one, DEFAULT_ELEMENTS)?.eigenvalue;
    c.check(
        (m - PI * PI).abs() <= 1e-8,
        format!("mu1(1) - pi^2 = {:.2e}", m - PI * PI),
    );
    c.check(
        (s1 - PI * PI).abs() <= 1e-8,
        format!("sigma1(1) - pi^2 = {:.2e}", s1 - PI * PI),
    );
    Ok(c.finish())
}

fn triangular_ratio() -> Outcome {
    let mut c = Checks::default();
    let (mut worst_bessel, mut worst_galerkin) = (0.0_f64, 0.0_f64);
    for k in 1..=9 {
        let x0 = k as f64 / 10.0;
        worst_bessel = worst_bessel.max((mu1_tent(x0)?.value / sigma1_tent(x0)?.value - 4.0).abs());
        let h = Profile::triangular(x0)?;
        let g = mu1(&h, DEFAULT_ELEMENTS)?.eigenvalue / sigma1(&h, DEFAULT_ELEMENTS)?.eigenvalue;
        worst_galerkin = worst_galerkin.max((g - 4.0).abs());
    }
    c.check(
        worst_bessel <= 1e-10,
        format!("max |ratio - 4| Bessel {worst_bessel:.2e}"),
    );
    c.check(
        worst_galerkin <= 1e-4,
        format!("Galerkin {worst_galerkin:.2e}"),
    );
    let target = 4.0 * j0_first_zero().powi(2);
    let mb = mu1_tent(0.5)?.value;
    let mg = mu1(&Profile::triangular(0.5)?, DEFAULT_ELEMENTS)?.eigenvalue;
    c.check(
        (mb - target).abs() <= 1e-8,
        format!("mu1(T_1/2) Bessel - 4 j01^2 = {:.2e}", mb - target),
    );
    c.check(
        (mg - target).abs() <= 1e-8,
        format!("Galerkin {:.2e}", mg - target),
    );
    Ok(c.finish())
}

fn profile_bounds() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (lo, hi) = (PI * PI / 12.0 - 1e-3, 4.0 + 1e-3);
    let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut outside = 0;
    for _ in 0..1000 {
        let h = random_concave(&mut rng, 10, false);
        let f = f_of_h(&h, DEFAULT_ELEMENTS)?.f;
        fmin = fmin.min(f);
        fmax = fmax.max(f);
        if !(lo..=hi).contains(&f) {
            outside += 1;
        }
    }
    c.check(
        outside == 0,
        format!("1000 profiles, {outside} outside, F in [{fmin:.6}, {fmax:.6}]"),
    );
    let mut worst = 0.0_f64;
    for k in 1..=9 {
        let f = f_of_h(&Profile::triangular(k as f64 / 10.0)?, DEFAULT_ELEMENTS)?.f;
        worst = worst.max((f - 2.0).abs());
    }
    c.check(worst <= 1e-4, format!("tents max |F - 2| = {worst:.2e}"));
    Ok(c.finish())
}

fn bounds_constants() -> Outcome {
    let mut c = Checks::default();
    let k = constant_k(1000, 1e-10)?;
    c.check(
        k.upper_bound <= 9.04,
        format!("2(1+K) = {:.9}", k.upper_bound),
    );
    let lemma = verify_lemma_brackets(1000);
    c.check(
        lemma.passed(),
        format!(
            "bracket checks {} failures {}",
            lemma.checks,
            lemma.failures.len()
        ),
    );
    let lower = lower_bound_constant();
    let target = PI * PI / (6.0 * 18f64.cbrt());
    c.check(
        (lower.value - target).abs() <= 1e-12,
        format!("lower constant {:.12}", lower.value),
    );
    c.check(
        (lower.delta - 18f64.cbrt()).abs() <= 1e-15 && lower.mismatch <= 1e-12,
        format!("branch mismatch at cbrt 18 {:.1e}", lower.mismatch),
    );
    Ok(c.finish())
}

fn fem_golden() -> Outcome {
    let mut c = Checks::default();
    let t1 = f_of_domain(&named(NamedShape::T1)?, 0.02)?;
    let t2 = f_of_domain(&named(NamedShape::T2)?, 0.02)?;
    let disk = f_of_domain(&named(NamedShape::Disk(256))?, 0.02)?;
    c.check(
        (t1.sigma1 - 1.2908).abs() <= 0.002,
        format!("sigma1(T1) {:.6}", t1.sigma1),
    );
    c.check(
        (t2.sigma1 - 0.7310).abs() <= 0.002,
        format!("sigma1(T2) {:.6}", t2.sigma1),
    );
    c.check((t1.f - 1.962).abs() <= 0.01, format!("F(T1) {:.6}", t1.f));
    c.check((t2.f - 1.977).abs() <= 0.01, format!("F(T2) {:.6}", t2.f));
    c.check(
        rel(t1.mu1, 16.0 * PI * PI / 9.0) <= 3e-3,
        format!("mu1(T1) rel {:.1e}", rel(t1.mu1, 16.0 * PI * PI / 9.0)),
    );
    c.check(
        rel(t2.mu1, PI * PI) <= 3e-3,
        format!("mu1(T2) rel {:.1e}", rel(t2.mu1, PI * PI)),
    );
    c.check(
        rel(disk.x, 2.0 * PI) <= 5e-3,
        format!("disk sigma1 P rel {:.1e}", rel(disk.x, 2.0 * PI)),
    );
    let yd = PI * j1_prime_first_zero().powi(2);
    c.check(
        rel(disk.y, yd) <= 5e-3,
        format!("disk mu1 |Omega| rel {:.1e}", rel(disk.y, yd)),
    );
    Ok(c.finish())
}

fn thin_asymptotics() -> Outcome {
    let mut c = Checks::default();
    let eps = [0.2, 0.1, 0.05, 0.025];
    let half = Profile::triangular(0.5)?.scaled(0.5);
    let r = thin_sweep(&half, &half, &eps, ThinMeshOptions::default())?;
    let j2 = j0_first_zero().powi(2);
    c.check(
        rel(r.mu1_limit, 4.0 * j2) <= 0.02,
        format!("rhombus mu1 limit rel {:.1e}", rel(r.mu1_limit, 4.0 * j2)),
    );
    c.check(
        rel(r.scaled_sigma_limit, j2) <= 0.03,
        format!(
            "2 sigma1/eps limit rel {:.1e}",
            rel(r.scaled_sigma_limit, j2)
        ),
    );
    let rect = thin_sweep(
        &Profile::constant(1.0),
        &Profile::constant(0.0),
        &eps,
        ThinMeshOptions::default(),
    )?;
    c.check(
        (rect.f_limit - 1.0).abs() <= 0.02,
        format!("rectangle F limit {:.6}", rect.f_limit),
    );
    Ok(c.finish())
}

fn variation_formulas() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0_f64;
    for i in 0..5 {
        let phi = random_concave(&mut rng, 8, false).combine(1.0, &Profile::constant(1.0), -1.0);
        let label = format!("random {i}");
        for r in [
            first_variation_sigma(&phi, &label)?,
            first_variation_mu(&phi, &label)?,
            first_variation_f(&phi, &label)?,
        ] {
            worst = worst.max(r.rel_error);
        }
    }
    c.check(
        worst <= 1e-4,
        format!("first variations max rel {worst:.1e}"),
    );
    let affine = Profile::new(vec![0.0, 1.0], vec![0.3, 0.8])?;
    let d = first_variation_f(&affine, "B + A x")?.finite_difference;
    c.check(d.abs() <= 1e-6, format!("dF along B + A x {d:.1e}"));
    let [_, _, f] = second_variation_f_linear(1.0)?;
    c.check(
        f.rel_error <= 1e-3,
        format!(
            "d2F along x {:.9} vs {:.9} rel {:.1e}",
            f.finite_difference,
            f_ddot_linear(1.0),
            f.rel_error
        ),
    );
    let res = eigenfunction_derivative_residuals(1.0);
    let worst_res = [
        res.v_ode,
        res.v_boundary,
        res.v_orthogonality.abs(),
        res.u_ode,
        res.u_boundary,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    c.check(
        worst_res <= 1e-10,
        format!("v'/u' residuals {worst_res:.1e}"),
    );
    Ok(c.finish())
}

fn diagram_campaign() -> Outcome {
    let mut c = Checks::default();
    let campaign = Campaign {
        family: Family::RandomPolygon,
        samples: 1000,
        seed: 7,
        mesh: MeshPolicy {
            h_rel: 0.03,
            min_across: 4,
        },
    };
    let res = run_campaign(&campaign)?;
    c.check(
        res.failures.is_empty(),
        format!(
            "{} points, {} failed samples",
            res.points.len(),
            res.failures.len()
        ),
    );
    c.check(
        res.hard_violations() == 0,
        format!("hard violations {}", res.hard_violations()),
    );
    let outside_axes = res
        .points
        .iter()
        .filter(|p| p.record.x > x_limit() || p.record.y > y_limit())
        .count();
    c.check(
        outside_axes == 0,
        format!("outside [0, 8 pi] x [0, pi j'11^2]: {outside_axes}"),
    );
    let rep = conjecture_report(&res.points)?;
    c.notes.push(format!(
        "outside 1 <= F <= 2 (reported): {}, F in [{:.6}, {:.6}]",
        rep.below_one + rep.above_two,
        rep.min_f.f,
        rep.max_f.f
    ));
    Ok(c.finish())
}

fn oracle_equivalence() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let h = random_concave(&mut rng, 10, true);
        let g = sigma1(&h, DEFAULT_ELEMENTS)?.eigenvalue;
        let o = sigma1_kernel_oracle(&h, DEFAULT_ORACLE_POINTS)?.eigenvalue;
        worst = worst.max(rel(o, g));
    }
    c.check(
        worst <= 1e-3,
        format!("50 profiles, max rel difference {worst:.2e}"),
    );
    Ok(c.finish())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1D cornerstone values", one_d_cornerstones),
        ("triangular ratio", triangular_ratio),
        ("F(h) bounds", profile_bounds),
        ("bounds constants", bounds_constants),
        ("FEM golden values", fem_golden),
        ("thin-domain asymptotics", thin_asymptotics),
        ("variation formulas", variation_formulas),
        ("diagram campaign", diagram_campaign),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {} {:<24} {}  ({:.1} s)  {detail}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
