//! Command-line front end. Every subcommand prints either aligned text or a
//! JSON document (`--json`), followed by a reproducibility stanza; all
//! floating-point output carries 12 significant digits.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bessel::{j0_first_zero, mu1_tent, sigma1_tent};
use crate::bounds::{
    constant_k, lower_bound_constant, per_domain_upper_bound, santalo_check, verify_lemma_brackets,
};
use crate::diagram::{self, Campaign, Family, MeshPolicy, SvgStyle};
use crate::fem2d::{f_of_domain, mesh::ThinMeshOptions, thin_sweep};
use crate::geom2d::ConvexPolygon;
use crate::profiles::{random_concave, uniform_knots, Profile};
use crate::sl1d;
use crate::variations::{self, Mode, OptimizeOptions, VariationReport};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SPECTRAL_LAB_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// `x` with 12 significant digits, fixed notation for moderate exponents and
/// scientific otherwise, trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        trim(&format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// Rounds every non-integer number in a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = sig12(x)
                    .parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "spectral-lab",
    version,
    about = "Neumann and Steklov eigenvalues of thin and convex planar domains"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Emit a JSON document instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for files written by a subcommand
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for parallel campaigns (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print timings to stderr
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// mu_1, sigma_1 and F of a profile
    F1d(F1dArgs),
    /// Tent eigenvalues from Bessel roots and their ratio
    TriangleRatio(TriangleArgs),
    /// The constants K and pi^2/(6 cbrt 18) and the quartic bracket check
    Bounds(BoundsArgs),
    /// Geometric functionals of a convex polygon
    Geom(GeomArgs),
    /// Finite-element mu_1, sigma_1 and F of a convex polygon
    Fem(FemArgs),
    /// Thin-domain sweep and extrapolation
    Thin(ThinArgs),
    /// Closed-form variations against finite differences
    VariationCheck(VariationArgs),
    /// Pattern search for extreme F over concave profiles
    OptimizeH(OptimizeArgs),
    /// Diagram campaign over a family of convex domains
    Diagram(DiagramArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct F1dArgs {
    /// const, parabolic[:n], tent:<x0>, or a profile JSON file
    #[arg(long)]
    pub profile: String,
    #[arg(long, default_value_t = sl1d::DEFAULT_ELEMENTS)]
    pub elements: usize,
    /// Cross-check sigma_1 with the Green-kernel operator
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = sl1d::DEFAULT_ORACLE_POINTS)]
    pub oracle_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct TriangleArgs {
    #[arg(long)]
    pub x0: f64,
    #[arg(long, default_value_t = sl1d::DEFAULT_ELEMENTS)]
    pub elements: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Write (tau, y1..y4, f) rows to this file
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GeomArgs {
    /// T1, T2, square, disk(n), rectangle(L,l), or a polygon JSON file
    #[arg(long)]
    pub shape: String,
}

#[derive(Args, Debug, Serialize)]
pub struct FemArgs {
    #[arg(long)]
    pub shape: String,
    /// Target edge length relative to the diameter
    #[arg(long, default_value_t = 0.02)]
    pub hmax: f64,
    /// Repeat with hmax halved this many times
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// Print CSV rows instead of a table
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ThinArgs {
    /// Upper profile h+
    #[arg(long)]
    pub profile: String,
    /// Lower profile h- (default: same as h+)
    #[arg(long)]
    pub minus: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = ThinMeshOptions::default().columns)]
    pub columns: usize,
    #[arg(long, default_value_t = ThinMeshOptions::default().layers)]
    pub layers: usize,
    /// Cluster columns towards the ends
    #[arg(long)]
    pub graded: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct VariationArgs {
    /// Add random concave directions and the A = 2 second variation
    #[arg(long)]
    pub all: bool,
    /// Random directions used with --all
    #[arg(long, default_value_t = 5)]
    pub random: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, default_value = "min")]
    pub mode: String,
    #[arg(long, default_value_t = 21)]
    pub knots: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Start the first run from h = 1
    #[arg(long)]
    pub start_constant: bool,
    #[arg(long, default_value_t = OptimizeOptions::default().max_evaluations)]
    pub max_evaluations: usize,
    #[arg(long, default_value_t = OptimizeOptions::default().elements)]
    pub elements: usize,
    /// Best profile file (default: <out-dir>/optimize-h-best.json)
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    /// Trace file (default: <out-dir>/optimize-h-trace.csv)
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagramArgs {
    /// randomPolygon, randomTriangle, randomQuadrilateral,
    /// collapsingRectangle, collapsingTent or named
    #[arg(long, default_value = "randomPolygon")]
    pub family: String,
    /// Number of domains (ignored by `named`)
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Target edge length relative to the diameter
    #[arg(long, default_value_t = MeshPolicy::default().h_rel)]
    pub hmax: f64,
    /// Minimum number of elements across the width
    #[arg(long, default_value_t = MeshPolicy::default().min_across)]
    pub min_across: usize,
    /// Write the points as CSV to this file
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write an SVG scatter plot to this file
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Text and JSON renderings of one result.
struct Report {
    text: String,
    json: Value,
    /// Set when the computation finished but violated a proved bound.
    failed: bool,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            failed: false,
        }
    }
}

/// Aligned `key  value` lines.
#[derive(Default)]
struct Lines(String);

impl Lines {
    fn num(&mut self, key: &str, v: f64) -> &mut Self {
        writeln!(self.0, "{key:<28} {}", sig12(v)).unwrap();
        self
    }

    fn text(&mut self, key: &str, v: impl std::fmt::Display) -> &mut Self {
        writeln!(self.0, "{key:<28} {v}").unwrap();
        self
    }

    fn raw(&mut self, line: &str) -> &mut Self {
        self.0.push_str(line);
        self.0.push('\n');
        self
    }
}

fn to_json(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

/// Relative paths land in `--out-dir`; absolute paths are kept.
fn out_path(global: &GlobalArgs, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
    global
        .out_dir
        .join(explicit.as_deref().unwrap_or(Path::new(default)))
}

fn optional_out_path(global: &GlobalArgs, explicit: &Option<PathBuf>) -> Option<PathBuf> {
    explicit.as_ref().map(|p| global.out_dir.join(p))
}

fn f1d(a: &F1dArgs) -> Result<Report> {
    let h = Profile::from_spec(&a.profile)?;
    let r = sl1d::f_of_h(&h, a.elements)?;
    let mut l = Lines::default();
    l.num("mu1", r.mu1)
        .num("sigma1", r.sigma1)
        .num("integral", r.integral)
        .num("F", r.f)
        .num("mu1_residual", r.mu1_residual)
        .num("sigma1_residual", r.sigma1_residual)
        .text("elements", r.elements);
    let mut json = json!({ "profile": a.profile, "result": to_json(&r) });
    if a.oracle {
        let o = sl1d::sigma1_kernel_oracle(&h, a.oracle_points)?;
        let delta = (o.eigenvalue - r.sigma1).abs() / r.sigma1;
        l.num("oracle_sigma1", o.eigenvalue)
            .num("oracle_rel_delta", delta)
            .text("oracle_points", o.points);
        json["oracle"] = json!({ "sigma1": o.eigenvalue, "rel_delta": delta, "points": o.points, "iterations": o.iterations });
    }
    Ok(Report::new(l.0, json))
}

fn triangle_ratio(a: &TriangleArgs) -> Result<Report> {
    let s = sigma1_tent(a.x0)?;
    let m = mu1_tent(a.x0)?;
    let tent = Profile::triangular(a.x0)?;
    let gs = sl1d::sigma1(&tent, a.elements)?.eigenvalue;
    let gm = sl1d::mu1(&tent, a.elements)?.eigenvalue;
    let ratio = m.value / s.value;
    let mut l = Lines::default();
    l.num("x0", a.x0)
        .num("sigma1_bessel", s.value)
        .num("mu1_bessel", m.value)
        .num("ratio", ratio)
        .num("ratio_minus_4", ratio - 4.0)
        .num("sigma1_galerkin", gs)
        .num("mu1_galerkin", gm)
        .num("sigma1_rel_delta", (gs - s.value) / s.value)
        .num("mu1_rel_delta", (gm - m.value) / m.value)
        .num("galerkin_ratio", gm / gs)
        .num("4_j01_squared", 4.0 * j0_first_zero().powi(2));
    let json = json!({
        "x0": a.x0,
        "sigma1": to_json(&s),
        "mu1": to_json(&m),
        "ratio": ratio,
        "galerkin": { "sigma1": gs, "mu1": gm, "ratio": gm / gs, "elements": a.elements,
            "sigma1_rel_delta": (gs - s.value) / s.value, "mu1_rel_delta": (gm - m.value) / m.value },
    });
    Ok(Report::new(l.0, json))
}

fn bounds(a: &BoundsArgs, global: &GlobalArgs) -> Result<Report> {
    let k = constant_k(a.grid, 1e-10)?;
    let lower = lower_bound_constant();
    let lemma = verify_lemma_brackets(a.grid);
    let mut l = Lines::default();
    l.num("K", k.k)
        .num("tau_star", k.tau_star)
        .num("2(1+K)", k.upper_bound)
        .num("pi^2/(6 cbrt 18)", lower.value)
        .num("branch_mismatch", lower.mismatch)
        .text("lemma_grid", lemma.grid)
        .text("lemma_checks", lemma.checks)
        .text("lemma_failures", lemma.failures.len())
        .num("overlap_disagreement", lemma.overlap_disagreement)
        .num("min_nonnegative_sample", lemma.min_nonnegative_sample)
        .text("lemma", if lemma.passed() { "pass" } else { "FAIL" });
    for f in lemma.failures.iter().take(10) {
        l.raw(&format!("  failure: {f}"));
    }
    let csv = optional_out_path(global, &a.csv);
    if let Some(path) = &csv {
        let mut s = String::from("tau,y1,y2,y3,y4,f\n");
        for r in &lemma.rows {
            let cols: Vec<String> = std::iter::once(r.tau)
                .chain(r.roots)
                .chain([r.f])
                .map(sig12)
                .collect();
            s.push_str(&cols.join(","));
            s.push('\n');
        }
        std::fs::write(path, s)?;
        l.text("csv", path.display());
    }
    let json = json!({
        "K": to_json(&k),
        "lower": to_json(&lower),
        "lemma": { "grid": lemma.grid, "checks": lemma.checks, "failures": lemma.failures,
            "overlap_disagreement": lemma.overlap_disagreement,
            "min_nonnegative_sample": lemma.min_nonnegative_sample, "passed": lemma.passed() },
    });
    let mut rep = Report::new(l.0, json);
    rep.failed = !lemma.passed();
    Ok(rep)
}

fn geom(a: &GeomArgs) -> Result<Report> {
    let poly = ConvexPolygon::from_spec(&a.shape)?;
    let g = poly.functionals();
    let bound = per_domain_upper_bound(&g)?;
    let s = santalo_check(&g)?;
    let mut l = Lines::default();
    l.text("vertices", poly.len())
        .num("area", g.area)
        .num("perimeter", g.perimeter)
        .num("diameter", g.diameter)
        .num("width", g.width)
        .num("inradius", g.inradius)
        .text(
            "incenter",
            format!("{} {}", sig12(g.incenter.x), sig12(g.incenter.y)),
        )
        .num("F_upper_bound", bound)
        .num("tau=w/D", s.tau)
        .num("2r/D", s.y)
        .num("y2(tau)", s.y2)
        .text("admissible", s.admissible)
        .text("above_y2", s.above_y2);
    let json = json!({ "shape": a.shape, "vertices": poly.len(), "functionals": to_json(&g),
        "incenter": [g.incenter.x, g.incenter.y], "F_upper_bound": bound, "santalo": to_json(&s) });
    Ok(Report::new(l.0, json))
}

const FEM_COLUMNS: [&str; 17] = [
    "hmax_rel",
    "area",
    "perimeter",
    "diameter",
    "width",
    "inradius",
    "mu1",
    "sigma1",
    "x",
    "y",
    "F",
    "dofs",
    "hmax",
    "mu_residual",
    "sigma_residual",
    "min_angle",
    "quality_warning",
];

fn fem(a: &FemArgs) -> Result<Report> {
    if a.levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    let poly = ConvexPolygon::from_spec(&a.shape)?;
    let mut records = Vec::new();
    let mut l = Lines::default();
    if a.csv {
        l.raw(&FEM_COLUMNS.join(","));
    }
    for level in 0..a.levels {
        let h = a.hmax / (1u64 << level) as f64;
        let r = f_of_domain(&poly, h)?;
        if a.csv {
            let mut cols: Vec<String> = [
                h,
                r.area,
                r.perimeter,
                r.diameter,
                r.width,
                r.inradius,
                r.mu1,
                r.sigma1,
                r.x,
                r.y,
                r.f,
            ]
            .map(sig12)
            .to_vec();
            cols.push(r.dofs.to_string());
            cols.extend([r.hmax, r.mu_residual, r.sigma_residual, r.min_angle].map(sig12));
            cols.push(r.quality_warning.to_string());
            l.raw(&cols.join(","));
        } else {
            if level > 0 {
                l.raw("");
            }
            l.num("hmax_rel", h)
                .num("mu1", r.mu1)
                .num("sigma1", r.sigma1)
                .num("x=sigma1*P", r.x)
                .num("y=mu1*|Omega|", r.y)
                .num("F", r.f)
                .text("dofs", r.dofs)
                .num("hmax", r.hmax)
                .num("min_angle_deg", r.min_angle)
                .num("mu_residual", r.mu_residual)
                .num("sigma_residual", r.sigma_residual);
            if r.quality_warning {
                l.text(
                    "quality_warning",
                    "minimum angle below target away from sharp corners",
                );
            }
        }
        let mut v = to_json(&r);
        v["hmax_rel"] = json!(h);
        records.push(v);
    }
    Ok(Report::new(
        l.0,
        json!({ "shape": a.shape, "records": records }),
    ))
}

fn thin(a: &ThinArgs) -> Result<Report> {
    let hp = Profile::from_spec(&a.profile)?;
    let hm = match &a.minus {
        Some(s) => Profile::from_spec(s)?,
        None => hp.clone(),
    };
    let opts = ThinMeshOptions {
        columns: a.columns,
        layers: a.layers,
        graded: a.graded,
    };
    let s = thin_sweep(&hp, &hm, &a.eps, opts)?;
    let mut l = Lines::default();
    l.raw(&format!(
        "{:>14} {:>20} {:>20} {:>20} {:>20} {:>8}",
        "eps", "mu1", "sigma1", "2 sigma1/eps", "F", "dofs"
    ));
    for r in &s.rows {
        l.raw(&format!(
            "{:>14} {:>20} {:>20} {:>20} {:>20} {:>8}",
            sig12(r.eps),
            sig12(r.mu1),
            sig12(r.sigma1),
            sig12(r.scaled_sigma),
            sig12(r.f),
            r.dofs
        ));
    }
    l.num("mu1_limit", s.mu1_limit)
        .num("mu1_1d", s.mu1_1d)
        .num("mu1_rel_error", s.mu1_rel_error())
        .num("scaled_sigma_limit", s.scaled_sigma_limit)
        .num("sigma1_1d", s.sigma1_1d)
        .num("sigma_rel_error", s.sigma_rel_error())
        .num("F_limit", s.f_limit)
        .num("F_1d", s.f_1d)
        .num("F_rel_error", s.f_rel_error());
    let mut json = to_json(&s);
    json["mu1_rel_error"] = json!(s.mu1_rel_error());
    json["sigma_rel_error"] = json!(s.sigma_rel_error());
    json["f_rel_error"] = json!(s.f_rel_error());
    Ok(Report::new(l.0, json))
}

/// Tolerances the variation table is judged against.
pub const FIRST_VARIATION_TOL: f64 = 1e-4;
pub const SECOND_VARIATION_TOL: f64 = 1e-3;

fn variation_rows(all: bool, random: usize, seed: u64) -> Result<Vec<(VariationReport, f64)>> {
    let knots = uniform_knots(257);
    let cosine = Profile::from_fn(knots.clone(), |x| (2.0 * std::f64::consts::PI * x).cos())?;
    let one = Profile::constant(1.0);
    let x = Profile::new(vec![0.0, 1.0], vec![0.0, 1.0])?;
    let affine = Profile::new(vec![0.0, 1.0], vec![0.2, 0.7])?;
    let t1 = FIRST_VARIATION_TOL;
    let mut rows = vec![
        (variations::first_variation_sigma(&one, "1")?, t1),
        (variations::first_variation_sigma(&x, "x")?, t1),
        (
            variations::first_variation_sigma(&cosine, "cos 2 pi x")?,
            t1,
        ),
        (variations::first_variation_mu(&one, "1")?, t1),
        (variations::first_variation_mu(&x, "x")?, t1),
        (variations::first_variation_mu(&cosine, "cos 2 pi x")?, t1),
        (variations::first_variation_f(&cosine, "cos 2 pi x")?, t1),
        (variations::first_variation_f(&affine, "0.2 + 0.5 x")?, t1),
    ];
    let slopes: &[f64] = if all { &[1.0, 2.0] } else { &[1.0] };
    for &a in slopes {
        rows.extend(
            variations::second_variation_f_linear(a)?
                .into_iter()
                .map(|r| (r, SECOND_VARIATION_TOL)),
        );
    }
    if all {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..random {
            let h = random_concave(&mut rng, 8, false);
            let phi = h.combine(1.0, &Profile::constant(1.0), -1.0);
            let label = format!("random {i} (h - 1)");
            rows.push((variations::first_variation_sigma(&phi, &label)?, t1));
            rows.push((variations::first_variation_mu(&phi, &label)?, t1));
            rows.push((variations::first_variation_f(&phi, &label)?, t1));
        }
    }
    Ok(rows)
}

/// Absolute-error floor for closed forms that vanish.
const ZERO_TARGET_ABS: f64 = 1e-6;

fn within(r: &VariationReport, tol: f64) -> bool {
    if r.analytic.abs() < ZERO_TARGET_ABS {
        r.abs_error <= ZERO_TARGET_ABS
    } else {
        r.rel_error <= tol
    }
}

fn variation_check(a: &VariationArgs, seed: u64) -> Result<Report> {
    let rows = variation_rows(a.all, a.random, seed)?;
    let res = variations::eigenfunction_derivative_residuals(1.0);
    let mut l = Lines::default();
    l.raw(&format!(
        "{:<11} {:<22} {:>20} {:>20} {:>12} {:>8} {}",
        "quantity", "direction", "closed form", "finite diff", "error", "order", "ok"
    ));
    let mut all_ok = true;
    let mut json_rows = Vec::new();
    for (r, tol) in &rows {
        let ok = within(r, *tol);
        all_ok &= ok;
        let err = if r.analytic.abs() < ZERO_TARGET_ABS {
            r.abs_error
        } else {
            r.rel_error
        };
        l.raw(&format!(
            "{:<11} {:<22} {:>20} {:>20} {:>12} {:>8} {}",
            r.quantity,
            r.direction,
            sig12(r.analytic),
            sig12(r.finite_difference),
            sig12(err),
            r.observed_order
                .map(|o| format!("{o:.2}"))
                .unwrap_or_else(|| "-".into()),
            if ok { "ok" } else { "FAIL" }
        ));
        let mut v = to_json(r);
        v["tolerance"] = json!(tol);
        v["ok"] = json!(ok);
        json_rows.push(v);
    }
    let res_ok = res.consistent(1e-10);
    l.raw("")
        .num("v_dot_ode_residual", res.v_ode)
        .num("v_dot_boundary", res.v_boundary)
        .num("v_dot_orthogonality", res.v_orthogonality)
        .num("u_dot_ode_residual", res.u_ode)
        .num("u_dot_boundary", res.u_boundary)
        .num("int_u_dot_u0", res.u_projection)
        .num("-A/4", res.u_projection_from_normalization)
        .num("A int x cos(pi x)", res.u_projection_displayed)
        .text(
            "eigenfunction_derivatives",
            if res_ok { "ok" } else { "FAIL" },
        );
    let json = json!({ "rows": json_rows, "residuals": to_json(&res), "all_ok": all_ok && res_ok });
    let mut rep = Report::new(l.0, json);
    rep.failed = !(all_ok && res_ok);
    Ok(rep)
}

fn optimize_h(a: &OptimizeArgs, global: &GlobalArgs) -> Result<Report> {
    let mode: Mode = a.mode.parse()?;
    let opts = OptimizeOptions {
        knots: a.knots,
        mode,
        restarts: a.restarts,
        seed: global.seed,
        start_constant: a.start_constant,
        max_evaluations: a.max_evaluations,
        elements: a.elements,
        ..Default::default()
    };
    let r = variations::optimize_f(&opts)?;
    let profile_path = out_path(global, &a.profile_out, "optimize-h-best.json");
    let trace_path = out_path(global, &a.trace_out, "optimize-h-trace.csv");
    r.best_profile.save(&profile_path)?;
    let mut trace = String::from("run,step,value\n");
    for (i, run) in r.runs.iter().enumerate() {
        for (k, v) in run.trace.iter().enumerate() {
            writeln!(trace, "{i},{k},{}", sig12(*v)).unwrap();
        }
    }
    std::fs::write(&trace_path, trace)?;
    let mut l = Lines::default();
    l.text("mode", &a.mode).num("best_F", r.best_value);
    for run in &r.runs {
        l.raw(&format!(
            "  {:<18} F = {:<16} evaluations {}",
            run.start,
            sig12(run.best_value),
            run.evaluations
        ));
    }
    l.num("pi^2/12", std::f64::consts::PI.powi(2) / 12.0)
        .text("profile", profile_path.display())
        .text("trace", trace_path.display());
    let runs: Vec<Value> = r
        .runs
        .iter()
        .map(|run| json!({ "start": run.start, "best_value": run.best_value, "evaluations": run.evaluations, "accepted_moves": run.trace.len() - 1 }))
        .collect();
    let json = json!({ "mode": a.mode, "best_value": r.best_value, "best_profile": to_json(&r.best_profile),
        "runs": runs, "profile_file": profile_path, "trace_file": trace_path });
    Ok(Report::new(l.0, json))
}

fn diagram_cmd(a: &DiagramArgs, global: &GlobalArgs) -> Result<Report> {
    let family: Family = a.family.parse()?;
    let c = Campaign {
        family,
        samples: a.n,
        seed: global.seed,
        mesh: MeshPolicy {
            h_rel: a.hmax,
            min_across: a.min_across,
        },
    };
    let res = diagram::run_campaign(&c)?;
    let meta = diagram::campaign_metadata(&c);
    let csv = optional_out_path(global, &a.csv);
    let svg = optional_out_path(global, &a.svg);
    if let Some(p) = &csv {
        diagram::emit_csv(&res.points, &meta, p)?;
    }
    if let Some(p) = &svg {
        diagram::emit_svg_scatter(&res.points, p, SvgStyle::default())?;
    }
    let mut l = Lines::default();
    l.text("family", family.name())
        .text("samples", diagram::sample_count(&c))
        .text("points", res.points.len())
        .text("failures", res.failures.len())
        .text("hard_violations", res.hard_violations())
        .text("outside_1<=F<=2", res.band_candidates());
    for f in &res.failures {
        l.raw(&format!("  failure {} {}: {}", f.id, f.label, f.error));
    }
    for p in res.points.iter().filter(|p| !p.hard_violations.is_empty()) {
        l.raw(&format!(
            "  violation {} {}: {}",
            p.id,
            p.label,
            p.hard_violations.join("; ")
        ));
    }
    let report = if res.points.is_empty() {
        None
    } else {
        Some(diagram::conjecture_report(&res.points)?)
    };
    if let Some(r) = &report {
        l.num("min_F", r.min_f.f).text(
            "min_F_sample",
            format!("{} ({})", r.min_f.id, r.min_f.label),
        );
        l.num("max_F", r.max_f.f).text(
            "max_F_sample",
            format!("{} ({})", r.max_f.id, r.max_f.label),
        );
        l.raw("nearest to F = 1:");
        for e in &r.nearest_to_one {
            l.raw(&format!(
                "  {} {} F = {} w/D = {}",
                e.id,
                e.label,
                sig12(e.f),
                sig12(e.width_over_diameter)
            ));
        }
    }
    if let Some(p) = &csv {
        l.text("csv", p.display());
    }
    if let Some(p) = &svg {
        l.text("svg", p.display());
    }
    let json = json!({
        "campaign": to_json(&c),
        "points": res.points.len(),
        "failures": to_json(&res.failures),
        "hard_violations": res.hard_violations(),
        "band_candidates": res.band_candidates(),
        "report": report.as_ref().map(to_json),
        "csv": csv, "svg": svg,
    });
    let mut rep = Report::new(l.0, json);
    rep.failed = res.hard_violations() > 0;
    Ok(rep)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::F1d(_) => "f1d",
        Command::TriangleRatio(_) => "triangle-ratio",
        Command::Bounds(_) => "bounds",
        Command::Geom(_) => "geom",
        Command::Fem(_) => "fem",
        Command::Thin(_) => "thin",
        Command::VariationCheck(_) => "variation-check",
        Command::OptimizeH(_) => "optimize-h",
        Command::Diagram(_) => "diagram",
    }
}

fn command_args(c: &Command) -> Value {
    match c {
        Command::F1d(a) => to_json(a),
        Command::TriangleRatio(a) => to_json(a),
        Command::Bounds(a) => to_json(a),
        Command::Geom(a) => to_json(a),
        Command::Fem(a) => to_json(a),
        Command::Thin(a) => to_json(a),
        Command::VariationCheck(a) => to_json(a),
        Command::OptimizeH(a) => to_json(a),
        Command::Diagram(a) => to_json(a),
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::F1d(a) => f1d(a),
        Command::TriangleRatio(a) => triangle_ratio(a),
        Command::Bounds(a) => bounds(a, g),
        Command::Geom(a) => geom(a),
        Command::Fem(a) => fem(a),
        Command::Thin(a) => thin(a),
        Command::VariationCheck(a) => variation_check(a, g.seed),
        Command::OptimizeH(a) => optimize_h(a, g),
        Command::Diagram(a) => diagram_cmd(a, g),
    }
}

/// Errors caused by the input or the file system rather than by the
/// computation.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_) | Error::Malformed(_) | Error::Json(_) | Error::Io(_)
    )
}

fn stanza(cli: &Cli, argv: &[String], threads: usize, seconds: f64) -> Value {
    json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "argv": argv,
        "seed": cli.global.seed,
        "threads": threads,
        "parameters": command_args(&cli.command),
        "elapsed_seconds": seconds,
    })
}

/// Parses `argv` (program name first), runs the subcommand and writes its
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let threads = rayon::current_num_threads();
    let start = std::time::Instant::now();
    let result = execute(&cli);
    let seconds = start.elapsed().as_secs_f64();
    if cli.global.verbose > 0 {
        let _ = writeln!(
            err,
            "{} finished in {seconds:.3} s",
            command_name(&cli.command)
        );
    }
    let argv_text: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let repro = stanza(&cli, &argv_text, threads, seconds);
    match result {
        Ok(rep) => {
            if cli.global.json {
                let mut doc = json!({ "command": command_name(&cli.command), "result": rep.json, "reproducibility": repro });
                round_json(&mut doc);
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                let _ = write!(out, "{}", rep.text);
                let _ = write!(out, "{}", stanza_text(&repro));
            }
            if rep.failed {
                let _ = writeln!(
                    err,
                    "error: {} violated a proved bound or tolerance",
                    command_name(&cli.command)
                );
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let code = if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            };
            if cli.global.json {
                let mut doc = json!({ "command": command_name(&cli.command), "error": e.to_string(), "reproducibility": repro });
                round_json(&mut doc);
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                let _ = write!(out, "{}", stanza_text(&repro));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn stanza_text(v: &Value) -> String {
    let mut s = String::from("# reproducibility\n");
    for key in ["program", "version", "command", "seed", "threads"] {
        writeln!(
            s,
            "#   {key}: {}",
            v[key]
                .as_str()
                .map(String::from)
                .unwrap_or_else(|| v[key].to_string())
        )
        .unwrap();
    }
    let argv: Vec<&str> = v["argv"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    writeln!(s, "#   argv: {}", argv.join(" ")).unwrap();
    writeln!(s, "#   parameters: {}", v["parameters"]).unwrap();
    writeln!(
        s,
        "#   elapsed_seconds: {}",
        sig12(v["elapsed_seconds"].as_f64().unwrap_or(0.0))
    )
    .unwrap();
    s
}

/// Entry point of the binary.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
