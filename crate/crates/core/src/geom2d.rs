//! Convex polygons and their geometric functionals: area, perimeter,
//! diameter, minimal width and inradius.

use std::f64::consts::PI;
use std::ops::{Add, Sub};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::profiles::Profile;
use crate::{Error, Result};

/// Planar point; serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// `(b - a) x (c - a)`: positive when `a, b, c` turn left.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Relative tolerance for collinearity when building polygons.
const COLLINEAR_TOL: f64 = 1e-12;

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

#[derive(Deserialize)]
struct RawPolygon {
    vertices: Vec<Point>,
}

impl<'de> Deserialize<'de> for ConvexPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolygon::deserialize(d)?;
        ConvexPolygon::new(raw.vertices).map_err(serde::de::Error::custom)
    }
}

/// Area, perimeter, diameter, minimal width and inradius of a convex body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryFunctionals {
    pub area: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub width: f64,
    pub inradius: f64,
    /// Center of a largest inscribed disk.
    #[serde(skip)]
    pub incenter: Point,
}

impl ConvexPolygon {
    /// Validates a counterclockwise, strictly convex vertex chain.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Degenerate(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::Malformed("non-finite vertex".into()));
        }
        let scale = bbox_scale(&vertices);
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            let o = orient(a, b, c);
            if o <= COLLINEAR_TOL * scale * scale {
                return Err(Error::Degenerate(format!(
                    "vertex {} is reflex or collinear (turn {o:.3e}); vertices must be counterclockwise and strictly convex",
                    (i + 1) % n
                )));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    /// Convex hull (Andrew's monotone chain) with collinear points dropped.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Malformed("non-finite point".into()));
        }
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Degenerate("fewer than 3 distinct points".into()));
        }
        let scale = bbox_scale(&pts);
        let eps = COLLINEAR_TOL * scale * scale;
        let mut chain: Vec<Point> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = chain.len();
            let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while chain.len() >= start + 2
                    && orient(chain[chain.len() - 2], chain[chain.len() - 1], p) <= eps
                {
                    chain.pop();
                }
                chain.push(p);
            }
            chain.pop();
        }
        ConvexPolygon::new(chain)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for (p, q) in self.edges() {
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// `true` when `p` lies in the closed polygon, up to `tol` in distance.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.edges()
            .all(|(a, b)| orient(a, b, p) / a.dist(b) >= -tol)
    }

    /// Maximal distance between two vertices by rotating calipers.
    pub fn diameter(&self) -> f64 {
        self.calipers().0
    }

    /// Minimal width by rotating calipers.
    pub fn width(&self) -> f64 {
        self.calipers().1
    }

    /// `(diameter, width)` from one sweep over antipodal pairs.
    fn calipers(&self) -> (f64, f64) {
        let v = &self.vertices;
        let n = v.len();
        let height =
            |i: usize, j: usize| orient(v[i], v[(i + 1) % n], v[j % n]) / v[i].dist(v[(i + 1) % n]);
        let mut j = 1;
        let mut diameter = 0.0_f64;
        let mut width = f64::INFINITY;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if j == i {
                j += 1;
            }
            diameter = diameter.max(a.dist(v[j % n])).max(b.dist(v[j % n]));
            while height(i, j + 1) >= height(i, j) {
                j += 1;
                diameter = diameter.max(a.dist(v[j % n])).max(b.dist(v[j % n]));
                if j > i + 2 * n {
                    break;
                }
            }
            width = width.min(height(i, j));
        }
        (diameter, width)
    }

    /// Radius and center of a largest inscribed disk: bisection on the radius
    /// with the feasible center region obtained by clipping the polygon with
    /// the inward-shifted edge half-planes.
    pub fn inradius(&self) -> (f64, Point) {
        let scale = bbox_scale(&self.vertices);
        let mut lo = 0.0;
        let mut hi = 0.5 * self.width();
        let mut center = self.centroid();
        while hi - lo > 1e-15 * scale {
            let mid = 0.5 * (lo + hi);
            match self.shrunk(mid) {
                Some(region) => {
                    lo = mid;
                    center = region_center(&region);
                }
                None => hi = mid,
            }
            if mid <= lo && mid >= hi {
                break;
            }
        }
        (lo, center)
    }

    /// Region of points at distance at least `r` from every edge line.
    fn shrunk(&self, r: f64) -> Option<Vec<Point>> {
        let mut region = self.vertices.clone();
        for (a, b) in self.edges() {
            let d = b.sub(a);
            let nrm = Point::new(-d.y, d.x).scale(1.0 / d.norm());
            // keep points with nrm . (p - a) >= r
            let offset = nrm.dot(a) + r;
            region = clip(&region, nrm, offset);
            if region.is_empty() {
                return None;
            }
        }
        Some(region)
    }

    pub fn functionals(&self) -> GeometryFunctionals {
        let (diameter, width) = self.calipers();
        let (inradius, incenter) = self.inradius();
        GeometryFunctionals {
            area: self.area(),
            perimeter: self.perimeter(),
            diameter,
            width,
            inradius,
            incenter,
        }
    }

    /// Image under `p -> s R(theta) p + t`.
    pub fn transformed(&self, s: f64, theta: f64, t: Point) -> Result<Self> {
        let (sn, cs) = theta.sin_cos();
        let v = self
            .vertices
            .iter()
            .map(|p| {
                Point::new(
                    s * (cs * p.x - sn * p.y) + t.x,
                    s * (sn * p.x + cs * p.y) + t.y,
                )
            })
            .collect();
        ConvexPolygon::new(v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Parses a shape id (`T1`, `T2`, `square`, `disk(n)`, `disk:n`,
    /// `rectangle(L,l)`, `rectangle:L,l`) or else reads a polygon file.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match parse_named(spec)? {
            Some(shape) => named(shape),
            None => Self::load(spec),
        }
    }
}

fn bbox_scale(p: &[Point]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for q in p {
        x0 = x0.min(q.x);
        x1 = x1.max(q.x);
        y0 = y0.min(q.y);
        y1 = y1.max(q.y);
    }
    (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE)
}

/// Sutherland-Hodgman clip of a convex region to `{p : n . p >= offset}`.
fn clip(region: &[Point], n: Point, offset: f64) -> Vec<Point> {
    let m = region.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = region[i];
        let q = region[(i + 1) % m];
        let fp = n.dot(p) - offset;
        let fq = n.dot(q) - offset;
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            out.push(p.lerp(q, fp / (fp - fq)));
        }
    }
    out
}

fn region_center(region: &[Point]) -> Point {
    let s = region
        .iter()
        .fold(Point::new(0.0, 0.0), |acc, &p| acc.add(p));
    s.scale(1.0 / region.len() as f64)
}

/// Shapes with a fixed construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedShape {
    /// Equilateral triangle of side 1.
    T1,
    /// Right isosceles triangle with legs 1.
    T2,
    /// Unit square.
    Square,
    /// Regular polygon with this many vertices and circumradius 1.
    Disk(usize),
    /// `[0, L] x [0, l]`.
    Rectangle(f64, f64),
}

pub const DEFAULT_DISK_SIDES: usize = 256;

fn parse_named(spec: &str) -> Result<Option<NamedShape>> {
    let s = spec.trim();
    let lower = s.to_ascii_lowercase();
    let args = |prefix: &str| -> Option<Vec<String>> {
        let rest = lower.strip_prefix(prefix)?;
        let inner = if let Some(r) = rest.strip_prefix('(') {
            r.strip_suffix(')')?
        } else if let Some(r) = rest.strip_prefix(':') {
            r
        } else if rest.is_empty() {
            ""
        } else {
            return None;
        };
        Some(
            inner
                .split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect(),
        )
    };
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad number {t:?} in shape {spec:?}")))
    };
    Ok(match lower.as_str() {
        "t1" => Some(NamedShape::T1),
        "t2" => Some(NamedShape::T2),
        "square" => Some(NamedShape::Square),
        _ => {
            if let Some(a) = args("disk") {
                let n = match a.as_slice() {
                    [] => DEFAULT_DISK_SIDES,
                    [n] => n.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad vertex count in {spec:?}"))
                    })?,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "disk takes one argument: {spec:?}"
                        )))
                    }
                };
                Some(NamedShape::Disk(n))
            } else if let Some(a) = args("rectangle") {
                match a.as_slice() {
                    [l, w] => Some(NamedShape::Rectangle(num(l)?, num(w)?)),
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "rectangle takes two arguments: {spec:?}"
                        )))
                    }
                }
            } else {
                None
            }
        }
    })
}

pub fn named(shape: NamedShape) -> Result<ConvexPolygon> {
    let p = Point::new;
    match shape {
        NamedShape::T1 => {
            ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.75f64.sqrt())])
        }
        NamedShape::T2 => ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]),
        NamedShape::Square => rectangle(1.0, 1.0),
        NamedShape::Disk(n) => regular(n),
        NamedShape::Rectangle(l, w) => rectangle(l, w),
    }
}

pub fn rectangle(length: f64, height: f64) -> Result<ConvexPolygon> {
    if !(length > 0.0 && height > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rectangle sides must be positive, got {length} x {height}"
        )));
    }
    let p = Point::new;
    ConvexPolygon::new(vec![
        p(0.0, 0.0),
        p(length, 0.0),
        p(length, height),
        p(0.0, height),
    ])
}

/// Regular `n`-gon of circumradius 1 centered at the origin.
pub fn regular(n: usize) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "regular polygon needs n >= 3, got {n}"
        )));
    }
    let v = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    ConvexPolygon::new(v)
}

/// Hull of `count` uniform points in the unit square, drawn from stream
/// `stream` of the generator seeded with `seed`.
pub fn random_hull_stream(count: usize, seed: u64, stream: u64) -> Result<ConvexPolygon> {
    if count < 3 {
        return Err(Error::InvalidArgument(format!(
            "random hull needs at least 3 points, got {count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    for _ in 0..RESAMPLE_CAP {
        let pts: Vec<Point> = (0..count)
            .map(|_| Point::new(rng.gen(), rng.gen()))
            .collect();
        if let Ok(h) = ConvexPolygon::hull(&pts) {
            return Ok(h);
        }
    }
    Err(Error::Degenerate(format!(
        "no nondegenerate hull after {RESAMPLE_CAP} draws"
    )))
}

const RESAMPLE_CAP: usize = 1000;

/// Hull of `count` uniform points in the unit square.
pub fn random_hull(count: usize, seed: u64) -> Result<ConvexPolygon> {
    random_hull_stream(count, seed, 0)
}

/// `{(x, y) : 0 <= x <= 1, -eps h_minus(x) <= y <= eps h_plus(x)}`.
///
/// Both chains are piecewise linear with vertices at the union of the two
/// knot sets, so the polygon is the domain itself, not an approximation.
pub fn thin_domain(hplus: &Profile, hminus: &Profile, eps: f64) -> Result<ConvexPolygon> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    for (name, h) in [("h+", hplus), ("h-", hminus)] {
        let report = h.validate();
        if !report.is_valid() {
            return Err(Error::InvalidArgument(format!(
                "{name} is not concave and nonnegative: {:?}",
                report.violations
            )));
        }
    }
    let mut xs: Vec<f64> = hplus
        .knots()
        .iter()
        .chain(hminus.knots())
        .copied()
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut pts: Vec<Point> = xs
        .iter()
        .map(|&x| Point::new(x, -eps * hminus.eval(x)))
        .collect();
    pts.extend(xs.iter().rev().map(|&x| Point::new(x, eps * hplus.eval(x))));
    pts.dedup();
    if pts.first() == pts.last() {
        pts.pop();
    }
    // drop collinear vertices, then require what remains to be strictly convex
    let scale = bbox_scale(&pts);
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            if orient(a, b, c).abs() <= COLLINEAR_TOL * scale * scale * 1e-2 || a == b {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    ConvexPolygon::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_diameter(p: &ConvexPolygon) -> f64 {
        let v = p.vertices();
        let mut d = 0.0_f64;
        for a in v {
            for b in v {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    fn brute_width(p: &ConvexPolygon) -> f64 {
        p.edges()
            .map(|(a, b)| {
                p.vertices()
                    .iter()
                    .map(|&c| orient(a, b, c) / a.dist(b))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn square_functionals() {
        let g = named(NamedShape::Square).unwrap().functionals();
        assert!((g.area - 1.0).abs() < 1e-15);
        assert!((g.perimeter - 4.0).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.width - 1.0).abs() < 1e-15);
        assert!((g.inradius - 0.5).abs() < 1e-13);
        assert!(g.incenter.dist(Point::new(0.5, 0.5)) < 1e-6);
    }

    #[test]
    fn equilateral_functionals() {
        let g = named(NamedShape::T1).unwrap().functionals();
        let s3 = 3f64.sqrt();
        assert!((g.area - s3 / 4.0).abs() < 1e-15);
        assert!((g.perimeter - 3.0).abs() < 1e-15);
        assert!((g.diameter - 1.0).abs() < 1e-15);
        assert!((g.width - s3 / 2.0).abs() < 1e-15);
        assert!((g.inradius - s3 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn regular_256_approaches_disk() {
        let g = named(NamedShape::Disk(256)).unwrap().functionals();
        assert!((g.area - PI).abs() < 1e-3);
        assert!((g.perimeter - 2.0 * PI).abs() < 1e-3);
        assert!((g.diameter - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_triangle_vertices() {
        let t = named(NamedShape::T2).unwrap();
        assert_eq!(
            t.vertices(),
            &[
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0)
            ]
        );
    }

    #[test]
    fn parse_shapes() {
        assert_eq!(parse_named("disk(64)").unwrap(), Some(NamedShape::Disk(64)));
        assert_eq!(parse_named("disk:64").unwrap(), Some(NamedShape::Disk(64)));
        assert_eq!(parse_named("disk").unwrap(), Some(NamedShape::Disk(256)));
        assert_eq!(
            parse_named("rectangle(1, 0.1)").unwrap(),
            Some(NamedShape::Rectangle(1.0, 0.1))
        );
        assert_eq!(parse_named("T1").unwrap(), Some(NamedShape::T1));
        assert_eq!(parse_named("some/file.json").unwrap(), None);
        assert!(parse_named("rectangle(1)").is_err());
    }

    #[test]
    fn rejects_clockwise_and_reflex() {
        let p = Point::new;
        assert!(ConvexPolygon::new(vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 0.0)]).is_err());
        assert!(
            ConvexPolygon::new(vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.2), p(1.0, 1.0)]).is_err()
        );
        assert!(
            ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(1.0, 1.0)]).is_err()
        );
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let p = Point::new;
        let pts = vec![
            p(0.3, 0.4),
            p(0.0, 0.0),
            p(1.0, 1.0),
            p(0.5, 0.0),
            p(1.0, 0.0),
            p(0.0, 1.0),
            p(0.9, 0.1),
        ];
        let h = ConvexPolygon::hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert!((h.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hull_is_deterministic() {
        assert_eq!(random_hull(15, 42).unwrap(), random_hull(15, 42).unwrap());
        assert_ne!(
            random_hull_stream(15, 42, 1).unwrap(),
            random_hull_stream(15, 42, 2).unwrap()
        );
    }

    #[test]
    fn thousand_random_hulls_are_convex() {
        for s in 0..1000 {
            let h = random_hull_stream(15, 9, s).unwrap();
            assert!(ConvexPolygon::new(h.vertices().to_vec()).is_ok());
        }
    }

    #[test]
    fn thin_rhombus_and_rectangle() {
        let half_tent = Profile::triangular(0.5).unwrap().scaled(0.5);
        let r = thin_domain(&half_tent, &half_tent, 0.1).unwrap();
        assert_eq!(r.len(), 4);
        assert!((r.area() - 0.1 * 0.5).abs() < 1e-15);

        let c = thin_domain(&Profile::constant(1.0), &Profile::constant(0.0), 0.2).unwrap();
        assert_eq!(c.len(), 4);
        assert!((c.area() - 0.2).abs() < 1e-15);
        assert_eq!(c, rectangle(1.0, 0.2).unwrap());
    }

    #[test]
    fn thin_domain_area_is_exact() {
        let hp = Profile::parabolic_star(33).unwrap();
        let hm = Profile::triangular(0.3).unwrap();
        let eps = 0.05;
        let d = thin_domain(&hp, &hm, eps).unwrap();
        assert!((d.area() - eps * (hp.integral() + hm.integral())).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let t = named(NamedShape::T1).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with("{\"vertices\":[[0.0,0.0]"));
        let back: ConvexPolygon = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(
            serde_json::from_str::<ConvexPolygon>("{\"vertices\":[[0,0],[0,1],[1,0]]}").is_err()
        );
    }

    proptest! {
        #[test]
        fn calipers_match_brute_force(seed in 0u64..5000, count in 3usize..20) {
            let p = random_hull(count, seed).unwrap();
            prop_assert!((p.diameter() - brute_diameter(&p)).abs() <= 1e-14);
            prop_assert!((p.width() - brute_width(&p)).abs() <= 1e-14);
        }

        #[test]
        fn inscribed_disk_touches_two_edges(seed in 0u64..5000) {
            let p = random_hull(15, seed).unwrap();
            let g = p.functionals();
            let dists: Vec<f64> = p.edges().map(|(a, b)| orient(a, b, g.incenter) / a.dist(b)).collect();
            let slack = 1e-9;
            prop_assert!(dists.iter().all(|&d| d >= g.inradius - slack));
            prop_assert!(dists.iter().filter(|&&d| d <= g.inradius + slack).count() >= 2);
        }

        #[test]
        fn functional_inequalities(seed in 0u64..5000) {
            let g = random_hull(15, seed).unwrap().functionals();
            prop_assert!(g.width <= g.diameter + 1e-15);
            prop_assert!(2.0 * g.inradius <= g.width + 1e-12);
            prop_assert!(g.perimeter <= PI * g.diameter + 1e-12);
            prop_assert!(g.area <= g.perimeter * g.diameter / 2.0);
        }

        #[test]
        fn rigid_motions_preserve_functionals(seed in 0u64..500, theta in 0.0..6.3f64) {
            let p = random_hull(15, seed).unwrap();
            let q = p.transformed(1.0, theta, Point::new(3.0, -2.0)).unwrap();
            let (a, b) = (p.functionals(), q.functionals());
            prop_assert!((a.area - b.area).abs() < 1e-12);
            prop_assert!((a.diameter - b.diameter).abs() < 1e-12);
            prop_assert!((a.width - b.width).abs() < 1e-12);
            prop_assert!((a.inradius - b.inradius).abs() < 1e-9);
        }
    }
}
