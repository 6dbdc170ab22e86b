//! Diagram campaigns: sample convex domains, compute
//! `(x, y) = (sigma_1 P, mu_1 |Omega|)`, check the proved bounds, report on
//! the conjectured band `1 <= F <= 2`, and write CSV and SVG.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::j1_prime_first_zero;
use crate::bounds::{lower_bound_constant, per_domain_upper_bound};
use crate::cli::sig12;
use crate::fem2d::{f_of_domain, FunctionalRecord};
use crate::geom2d::{named, random_hull_stream, rectangle, thin_domain, ConvexPolygon, NamedShape};
use crate::profiles::Profile;
use crate::{Error, Result};

/// Proved upper bound on `F` over convex domains.
pub const GLOBAL_UPPER: f64 = 9.04;
/// Slack below the proved lower bound, absorbing discretization error.
pub const GLOBAL_LOWER_SLACK: f64 = 0.01;
/// Relative slack on the per-domain bound.
pub const PER_DOMAIN_SLACK: f64 = 1e-6;
/// Relative slack on the axis limits: Galerkin eigenvalues overestimate, and
/// near-disks sit within that error of the limit.
pub const AXIS_SLACK: f64 = 1e-4;
/// Points of the random polygon family.
pub const POLYGON_POINTS: usize = 15;
/// Thinnest rectangle and tent in the collapsing families.
pub const MIN_EPS: f64 = 0.02;

/// `8 pi`, the supremum of `sigma_1 P`.
pub fn x_limit() -> f64 {
    8.0 * PI
}

/// `pi j'_{11}^2`, the supremum of `mu_1 |Omega|`.
pub fn y_limit() -> f64 {
    PI * j1_prime_first_zero().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    RandomPolygon,
    RandomTriangle,
    RandomQuadrilateral,
    CollapsingRectangle,
    CollapsingTent,
    Named,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::RandomPolygon,
        Family::RandomTriangle,
        Family::RandomQuadrilateral,
        Family::CollapsingRectangle,
        Family::CollapsingTent,
        Family::Named,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomPolygon => "randomPolygon",
            Family::RandomTriangle => "randomTriangle",
            Family::RandomQuadrilateral => "randomQuadrilateral",
            Family::CollapsingRectangle => "collapsingRectangle",
            Family::CollapsingTent => "collapsingTent",
            Family::Named => "named",
        }
    }

    /// How the family's domains are generated, for the CSV metadata.
    pub fn generator(self) -> &'static str {
        match self {
            Family::RandomPolygon => "hull of 15 uniform points in [0,1]^2, ChaCha8 stream = sample id",
            Family::RandomTriangle => "3 uniform points in [0,1]^2, ChaCha8 stream = sample id",
            Family::RandomQuadrilateral => {
                "4 uniform points in [0,1]^2 redrawn until in convex position, ChaCha8 stream = sample id"
            }
            Family::CollapsingRectangle => "[0,1] x [0,eps], eps geometric from 1 down to 0.02",
            Family::CollapsingTent => {
                "|y| <= eps T(x), T the tent of height 1 with peak uniform in [0.1,0.9], eps geometric from 1 down to 0.02"
            }
            Family::Named => "T1, T2, square, disk(256)",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// Mesh size `min(h_rel D, w / min_across)`, so thin domains keep several
/// elements across.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeshPolicy {
    pub h_rel: f64,
    pub min_across: usize,
}

impl Default for MeshPolicy {
    fn default() -> Self {
        MeshPolicy {
            h_rel: 0.03,
            min_across: 4,
        }
    }
}

impl MeshPolicy {
    pub fn relative_size(&self, poly: &ConvexPolygon) -> f64 {
        let g = poly.functionals();
        self.h_rel
            .min(g.width / (g.diameter * self.min_across.max(1) as f64))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Campaign {
    pub family: Family,
    pub samples: usize,
    pub seed: u64,
    pub mesh: MeshPolicy,
}

/// One domain of a campaign.
#[derive(Clone, Debug, Serialize)]
pub struct DiagramPoint {
    pub id: usize,
    pub family: Family,
    pub seed: u64,
    pub label: String,
    #[serde(flatten)]
    pub record: FunctionalRecord,
    pub per_domain_bound: f64,
    /// Proved bounds violated by this point; empty for a valid point.
    pub hard_violations: Vec<String>,
    /// `F` outside `[1, 2]`.
    pub band_candidate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleFailure {
    pub id: usize,
    pub label: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignResult {
    pub campaign: Campaign,
    pub points: Vec<DiagramPoint>,
    pub failures: Vec<SampleFailure>,
}

impl CampaignResult {
    pub fn hard_violations(&self) -> usize {
        self.points
            .iter()
            .filter(|p| !p.hard_violations.is_empty())
            .count()
    }

    pub fn band_candidates(&self) -> usize {
        self.points.iter().filter(|p| p.band_candidate).count()
    }
}

/// `n` values from 1 down to `MIN_EPS`, geometrically spaced.
fn eps_sequence(n: usize, i: usize) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    MIN_EPS.powf(i as f64 / (n - 1) as f64)
}

fn sample_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

const NAMED: [NamedShape; 4] = [
    NamedShape::T1,
    NamedShape::T2,
    NamedShape::Square,
    NamedShape::Disk(256),
];

/// Domain `id` of a family, with a short label.
pub fn sample_domain(
    family: Family,
    samples: usize,
    seed: u64,
    id: usize,
) -> Result<(ConvexPolygon, String)> {
    match family {
        Family::RandomPolygon => Ok((
            random_hull_stream(POLYGON_POINTS, seed, id as u64)?,
            format!("stream {id}"),
        )),
        Family::RandomTriangle => Ok((
            random_hull_stream(3, seed, id as u64)?,
            format!("stream {id}"),
        )),
        Family::RandomQuadrilateral => {
            let mut rng = sample_rng(seed, id);
            for _ in 0..1000 {
                let pts: Vec<_> = (0..4)
                    .map(|_| crate::geom2d::Point::new(rng.gen(), rng.gen()))
                    .collect();
                if let Ok(p) = ConvexPolygon::hull(&pts) {
                    if p.len() == 4 {
                        return Ok((p, format!("stream {id}")));
                    }
                }
            }
            Err(Error::Degenerate(
                "no convex quadrilateral after 1000 draws".into(),
            ))
        }
        Family::CollapsingRectangle => {
            let eps = eps_sequence(samples, id);
            Ok((rectangle(1.0, eps)?, format!("eps {}", sig12(eps))))
        }
        Family::CollapsingTent => {
            let eps = eps_sequence(samples, id);
            let x0 = sample_rng(seed, id).gen_range(0.1..0.9);
            let tent = Profile::triangular(x0)?;
            Ok((
                thin_domain(&tent, &tent, eps)?,
                format!("eps {} peak {}", sig12(eps), sig12(x0)),
            ))
        }
        Family::Named => {
            let shape = NAMED[id % NAMED.len()];
            Ok((named(shape)?, format!("{shape:?}")))
        }
    }
}

/// Samples in a campaign; the named family always has its four shapes.
pub fn sample_count(c: &Campaign) -> usize {
    if c.family == Family::Named {
        NAMED.len()
    } else {
        c.samples
    }
}

fn evaluate(
    c: &Campaign,
    id: usize,
    lower: f64,
) -> std::result::Result<DiagramPoint, SampleFailure> {
    let fail = |label: &str, e: Error| SampleFailure {
        id,
        label: label.into(),
        error: e.to_string(),
    };
    let (poly, label) = sample_domain(c.family, c.samples, c.seed, id).map_err(|e| fail("", e))?;
    let record = f_of_domain(&poly, c.mesh.relative_size(&poly)).map_err(|e| fail(&label, e))?;
    let bound = per_domain_upper_bound(&poly.functionals()).map_err(|e| fail(&label, e))?;
    let mut hard = Vec::new();
    if record.f > bound * (1.0 + PER_DOMAIN_SLACK) {
        hard.push(format!(
            "F = {} above per-domain bound {}",
            sig12(record.f),
            sig12(bound)
        ));
    }
    if record.f > GLOBAL_UPPER {
        hard.push(format!("F = {} above {GLOBAL_UPPER}", sig12(record.f)));
    }
    if record.f < lower - GLOBAL_LOWER_SLACK {
        hard.push(format!("F = {} below {}", sig12(record.f), sig12(lower)));
    }
    if !(record.x > 0.0 && record.x <= x_limit() * (1.0 + AXIS_SLACK)) {
        hard.push(format!("x = {} outside (0, 8 pi]", sig12(record.x)));
    }
    if !(record.y > 0.0 && record.y <= y_limit() * (1.0 + AXIS_SLACK)) {
        hard.push(format!("y = {} outside (0, pi j'11^2]", sig12(record.y)));
    }
    Ok(DiagramPoint {
        id,
        family: c.family,
        seed: c.seed,
        label,
        band_candidate: !(1.0..=2.0).contains(&record.f),
        record,
        per_domain_bound: bound,
        hard_violations: hard,
    })
}

/// Evaluates every sample in parallel; failures are kept, not dropped.
pub fn run_campaign(c: &Campaign) -> Result<CampaignResult> {
    if !(c.mesh.h_rel > 0.0 && c.mesh.h_rel <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "relative mesh size must lie in (0, 1], got {}",
            c.mesh.h_rel
        )));
    }
    let lower = lower_bound_constant().value;
    let outcomes: Vec<_> = (0..sample_count(c))
        .into_par_iter()
        .map(|id| evaluate(c, id, lower))
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => points.push(p),
            Err(f) => failures.push(f),
        }
    }
    Ok(CampaignResult {
        campaign: c.clone(),
        points,
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Extreme {
    pub id: usize,
    pub family: Family,
    pub label: String,
    pub f: f64,
    pub x: f64,
    pub y: f64,
    pub width_over_diameter: f64,
}

impl Extreme {
    fn of(p: &DiagramPoint) -> Self {
        Extreme {
            id: p.id,
            family: p.family,
            label: p.label.clone(),
            f: p.record.f,
            x: p.record.x,
            y: p.record.y,
            width_over_diameter: p.record.width / p.record.diameter,
        }
    }
}

/// Rectangles against quadrilaterals in one bin of `x`.
#[derive(Clone, Debug, Serialize)]
pub struct BinComparison {
    pub x_lo: f64,
    pub x_hi: f64,
    pub rectangle_min_y: f64,
    pub quadrilateral_min_y: f64,
    pub rectangle_attains_min: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub count: usize,
    pub min_f: Extreme,
    pub max_f: Extreme,
    pub below_one: usize,
    pub above_two: usize,
    /// Samples with the smallest `F`, closest to the conjectured floor.
    pub nearest_to_one: Vec<Extreme>,
    /// Present when both quadrilaterals and rectangles are in the collection.
    pub rectangle_bins: Option<Vec<BinComparison>>,
}

pub const NEAREST_LISTED: usize = 5;
pub const X_BINS: usize = 16;

pub fn conjecture_report(points: &[DiagramPoint]) -> Result<ConjectureReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "conjecture report needs at least one point".into(),
        ));
    }
    let mut by_f: Vec<&DiagramPoint> = points.iter().collect();
    by_f.sort_by(|a, b| a.record.f.total_cmp(&b.record.f));
    let nearest_to_one = by_f
        .iter()
        .take(NEAREST_LISTED)
        .map(|p| Extreme::of(p))
        .collect();
    Ok(ConjectureReport {
        count: points.len(),
        min_f: Extreme::of(by_f[0]),
        max_f: Extreme::of(by_f[by_f.len() - 1]),
        below_one: points.iter().filter(|p| p.record.f < 1.0).count(),
        above_two: points.iter().filter(|p| p.record.f > 2.0).count(),
        nearest_to_one,
        rectangle_bins: rectangle_bins(points),
    })
}

fn rectangle_bins(points: &[DiagramPoint]) -> Option<Vec<BinComparison>> {
    let rects: Vec<_> = points
        .iter()
        .filter(|p| p.family == Family::CollapsingRectangle)
        .collect();
    let quads: Vec<_> = points
        .iter()
        .filter(|p| p.family == Family::RandomQuadrilateral)
        .collect();
    if rects.is_empty() || quads.is_empty() {
        return None;
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.record.x), b.max(p.record.x))
        });
    let w = (hi - lo) / X_BINS as f64;
    let bin_of = |x: f64| (((x - lo) / w) as usize).min(X_BINS - 1);
    let min_y = |set: &[&DiagramPoint], b: usize| {
        set.iter()
            .filter(|p| bin_of(p.record.x) == b)
            .map(|p| p.record.y)
            .fold(f64::INFINITY, f64::min)
    };
    Some(
        (0..X_BINS)
            .filter_map(|b| {
                let (r, q) = (min_y(&rects, b), min_y(&quads, b));
                (r.is_finite() && q.is_finite()).then(|| BinComparison {
                    x_lo: lo + b as f64 * w,
                    x_hi: lo + (b + 1) as f64 * w,
                    rectangle_min_y: r,
                    quadrilateral_min_y: q,
                    rectangle_attains_min: r <= q,
                })
            })
            .collect(),
    )
}

pub const CSV_HEADER: &str =
    "id,family,seed,area,perimeter,diameter,width,inradius,mu1,sigma1,x,y,F,dofs,hmax";

/// CSV text: `#` metadata lines, the header, one row per point.
pub fn csv_string(points: &[DiagramPoint], metadata: &[String]) -> String {
    let mut out = String::new();
    for m in metadata {
        writeln!(out, "# {m}").unwrap();
    }
    let flagged: Vec<String> = points
        .iter()
        .filter(|p| p.band_candidate)
        .map(|p| p.id.to_string())
        .collect();
    if !flagged.is_empty() {
        writeln!(out, "# outside 1 <= F <= 2: ids {}", flagged.join(" ")).unwrap();
    }
    writeln!(out, "{CSV_HEADER}").unwrap();
    for p in points {
        let r = &p.record;
        let nums = [
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
        .map(sig12);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.id,
            p.family.name(),
            p.seed,
            nums.join(","),
            r.dofs,
            sig12(r.hmax)
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(
    points: &[DiagramPoint],
    metadata: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    Ok(fs::write(path, csv_string(points, metadata))?)
}

/// Scatter plot appearance.
#[derive(Clone, Copy, Debug)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    pub reference_lines: bool,
    pub color_by_family: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 720.0,
            height: 480.0,
            radius: 2.0,
            reference_lines: true,
            color_by_family: true,
        }
    }
}

const MARGIN: f64 = 50.0;

fn color(f: Family) -> &'static str {
    match f {
        Family::RandomPolygon => "#1f77b4",
        Family::RandomTriangle => "#d62728",
        Family::RandomQuadrilateral => "#2ca02c",
        Family::CollapsingRectangle => "#ff7f0e",
        Family::CollapsingTent => "#9467bd",
        Family::Named => "#000000",
    }
}

/// SVG scatter on `[0, 8 pi] x [0, pi j'11^2]`; with reference lines
/// `y = x` and `y = 2x` drawn in data coordinates.
pub fn svg_string(points: &[DiagramPoint], style: SvgStyle) -> String {
    let (xm, ym) = (x_limit(), y_limit());
    let pw = style.width - 2.0 * MARGIN;
    let ph = style.height - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + x / xm * pw;
    let sy = |y: f64| style.height - MARGIN - y / ym * ph;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
        MARGIN, MARGIN
    )
    .unwrap();
    for k in 0..=8 {
        let x = k as f64 * PI;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            sx(x),
            sy(0.0) + 14.0,
            if k == 0 { "0".into() } else { format!("{k}π") }
        )
        .unwrap();
    }
    for k in 0..=5 {
        let y = ym * k as f64 / 5.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.2}</text>"#,
            sx(0.0) - 4.0,
            sy(y) + 3.0,
            y
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">σ₁P</text>"#,
        style.width / 2.0,
        style.height - 12.0
    )
    .unwrap();
    writeln!(s, r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">μ₁|Ω|</text>"#, style.height / 2.0, style.height / 2.0).unwrap();
    if style.reference_lines {
        for slope in [1.0, 2.0] {
            let x_end = xm.min(ym / slope);
            writeln!(
                s,
                r#"<line class="reference" data-slope="{slope}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
                sx(0.0),
                sy(0.0),
                sx(x_end),
                sy(slope * x_end)
            )
            .unwrap();
        }
    }
    for p in points {
        let fill = if style.color_by_family {
            color(p.family)
        } else {
            "#1f77b4"
        };
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="{fill}"><title>{} {} F={}</title></circle>"#,
            sx(p.record.x),
            sy(p.record.y),
            style.radius,
            p.family.name(),
            p.id,
            sig12(p.record.f)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg_scatter(
    points: &[DiagramPoint],
    path: impl AsRef<Path>,
    style: SvgStyle,
) -> Result<()> {
    Ok(fs::write(path, svg_string(points, style))?)
}

/// Metadata lines describing a campaign.
pub fn campaign_metadata(c: &Campaign) -> Vec<String> {
    vec![
        format!("family {}: {}", c.family.name(), c.family.generator()),
        format!("samples {} seed {}", sample_count(c), c.seed),
        format!(
            "mesh h = min({} D, w / {})",
            sig12(c.mesh.h_rel),
            c.mesh.min_across
        ),
        "x = sigma1 * perimeter, y = mu1 * area, F = y / x".into(),
    ]
}
