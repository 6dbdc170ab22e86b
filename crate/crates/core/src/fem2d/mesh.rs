//! Triangulations of convex polygons.
//!
//! Unstructured meshes are Delaunay triangulations of a point set made of
//! the subdivided polygon boundary and an interior triangular lattice, built
//! incrementally from a fan of the polygon with Lawson flips, then smoothed.
//! Since every point lies in the convex polygon and the boundary points are
//! on its edges, any triangulation of the point set contains the subdivided
//! boundary, so no constrained edges are needed.

use std::collections::HashMap;
use std::ops::{Add, Sub};

use serde::Serialize;

use crate::geom2d::{orient, ConvexPolygon, Point};
use crate::profiles::Profile;
use crate::{Error, Result};

/// Smallest interior angle the smoother aims for, in degrees.
pub const MIN_ANGLE_TARGET: f64 = 20.0;

/// Conforming triangulation with counterclockwise triangles.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleMesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges oriented with the domain on their left.
    pub boundary_edges: Vec<[usize; 2]>,
}

/// Shape statistics of a mesh.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeshQuality {
    /// Smallest interior angle in degrees.
    pub min_angle: f64,
    /// Longest edge.
    pub h_max: f64,
    /// Set when `min_angle` is below [`MIN_ANGLE_TARGET`].
    pub warning: bool,
    /// Smallest corner angle of the domain in degrees; meshes cannot beat it.
    pub corner_limit: f64,
}

impl TriangleMesh {
    /// Checks orientation and conformity and extracts the boundary.
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut edge_count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nodes.len()) {
                return Err(Error::Malformed(format!(
                    "triangle {t} references a missing node"
                )));
            }
            let [a, b, c] = tri.map(|v| nodes[v]);
            if !(orient(a, b, c) > 0.0) {
                return Err(Error::Degenerate(format!(
                    "triangle {t} is not counterclockwise"
                )));
            }
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let e = edge_count
                    .entry((u.min(v), u.max(v)))
                    .or_insert((0, [u, v]));
                e.0 += 1;
                if e.0 > 2 {
                    return Err(Error::Malformed(format!(
                        "edge ({u}, {v}) shared by more than two triangles"
                    )));
                }
            }
        }
        let mut boundary_edges: Vec<[usize; 2]> = edge_count
            .values()
            .filter(|(c, _)| *c == 1)
            .map(|(_, e)| *e)
            .collect();
        boundary_edges.sort_unstable();
        Ok(TriangleMesh {
            nodes,
            triangles,
            boundary_edges,
        })
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| 0.5 * orient(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]))
            .sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| self.nodes[e[0]].dist(self.nodes[e[1]]))
            .sum()
    }

    /// `true` when the boundary edges form one closed chain.
    pub fn boundary_is_closed_chain(&self) -> bool {
        let next: HashMap<usize, usize> =
            self.boundary_edges.iter().map(|e| (e[0], e[1])).collect();
        if next.len() != self.boundary_edges.len() || self.boundary_edges.is_empty() {
            return false;
        }
        let start = self.boundary_edges[0][0];
        let mut v = start;
        for _ in 0..self.boundary_edges.len() {
            match next.get(&v) {
                Some(&w) => v = w,
                None => return false,
            }
        }
        v == start
    }

    pub fn quality(&self) -> MeshQuality {
        let mut min_angle = f64::INFINITY;
        let mut h_max = 0.0_f64;
        for t in &self.triangles {
            let p = t.map(|v| self.nodes[v]);
            min_angle = min_angle.min(min_triangle_angle(p));
            for k in 0..3 {
                h_max = h_max.max(p[k].dist(p[(k + 1) % 3]));
            }
        }
        let corner_limit = self.corner_angles().into_iter().fold(180.0, f64::min);
        MeshQuality {
            min_angle,
            h_max,
            warning: min_angle < MIN_ANGLE_TARGET,
            corner_limit,
        }
    }

    /// Interior angles of the domain at boundary nodes where the boundary turns.
    fn corner_angles(&self) -> Vec<f64> {
        let prev: HashMap<usize, usize> =
            self.boundary_edges.iter().map(|e| (e[1], e[0])).collect();
        self.boundary_edges
            .iter()
            .filter_map(|e| {
                let v = e[0];
                let u = *prev.get(&v)?;
                let (a, b, c) = (self.nodes[u], self.nodes[v], self.nodes[e[1]]);
                let turn = orient(a, b, c);
                if turn.abs() <= 1e-12 * a.dist(b) * b.dist(c) {
                    return None;
                }
                let d1 = a.sub(b);
                let d2 = c.sub(b);
                Some(d1.cross(d2).abs().atan2(d1.dot(d2)).to_degrees())
            })
            .collect()
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refine_uniform(&self) -> TriangleMesh {
        let mut nodes = self.nodes.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |u: usize, v: usize, nodes: &mut Vec<Point>| -> usize {
            *mid.entry((u.min(v), u.max(v))).or_insert_with(|| {
                nodes.push(nodes[u].lerp(nodes[v], 0.5));
                nodes.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut nodes);
            let bc = midpoint(b, c, &mut nodes);
            let ca = midpoint(c, a, &mut nodes);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        TriangleMesh::new(nodes, triangles).expect("refinement of a valid mesh is valid")
    }
}

fn min_triangle_angle(p: [Point; 3]) -> f64 {
    let mut m = f64::INFINITY;
    for k in 0..3 {
        let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
        let d1 = b.sub(a);
        let d2 = c.sub(a);
        m = m.min(d1.cross(d2).abs().atan2(d1.dot(d2)).to_degrees());
    }
    m
}

/// In-circle predicate: positive when `d` is strictly inside the circumcircle
/// of the counterclockwise triangle `a, b, c`.
fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

/// Incremental Delaunay triangulation inside a convex polygon.
struct Builder {
    pts: Vec<Point>,
    tris: Vec<[usize; 3]>,
    /// `nbr[t][i]`: triangle across the edge opposite vertex `i`.
    nbr: Vec<[Option<usize>; 3]>,
    last: usize,
    eps: f64,
}

enum Location {
    Inside(usize),
    OnEdge(usize, usize),
}

impl Builder {
    fn from_fan(poly: &ConvexPolygon, scale: f64) -> Self {
        let pts: Vec<Point> = poly.vertices().to_vec();
        let n = pts.len();
        let tris: Vec<[usize; 3]> = (1..n - 1).map(|i| [0, i, i + 1]).collect();
        let m = tris.len();
        let nbr = (0..m)
            .map(|t| {
                // opposite 0 is the polygon edge; opposite i is the next fan triangle;
                // opposite i+1 the previous one
                [
                    None,
                    if t + 1 < m { Some(t + 1) } else { None },
                    if t > 0 { Some(t - 1) } else { None },
                ]
            })
            .collect();
        Builder {
            pts,
            tris,
            nbr,
            last: 0,
            eps: 1e-12 * scale * scale,
        }
    }

    fn locate(&mut self, p: Point) -> Result<Location> {
        let mut t = self.last.min(self.tris.len() - 1);
        for _ in 0..(4 * self.tris.len() + 16) {
            let tri = self.tris[t];
            let mut moved = false;
            let mut on_edge = None;
            for i in 0..3 {
                let (a, b) = (self.pts[tri[(i + 1) % 3]], self.pts[tri[(i + 2) % 3]]);
                let o = orient(a, b, p);
                if o < -self.eps {
                    match self.nbr[t][i] {
                        Some(u) => {
                            t = u;
                            moved = true;
                            break;
                        }
                        None => return self.locate_exhaustive(p),
                    }
                } else if o <= self.eps {
                    on_edge = Some(i);
                }
            }
            if !moved {
                self.last = t;
                return Ok(match on_edge {
                    Some(i) => Location::OnEdge(t, i),
                    None => Location::Inside(t),
                });
            }
        }
        self.locate_exhaustive(p)
    }

    fn locate_exhaustive(&mut self, p: Point) -> Result<Location> {
        for t in 0..self.tris.len() {
            let tri = self.tris[t];
            let o: Vec<f64> = (0..3)
                .map(|i| orient(self.pts[tri[(i + 1) % 3]], self.pts[tri[(i + 2) % 3]], p))
                .collect();
            if o.iter().all(|&v| v >= -self.eps) {
                self.last = t;
                return Ok(match (0..3).find(|&i| o[i] <= self.eps) {
                    Some(i) => Location::OnEdge(t, i),
                    None => Location::Inside(t),
                });
            }
        }
        Err(Error::Degenerate("mesh point outside the polygon".into()))
    }

    fn set_nbr(&mut self, t: Option<usize>, old: usize, new: usize) {
        if let Some(t) = t {
            for k in 0..3 {
                if self.nbr[t][k] == Some(old) {
                    self.nbr[t][k] = Some(new);
                }
            }
        }
    }

    fn insert(&mut self, p: Point) -> Result<()> {
        let loc = self.locate(p)?;
        let v = self.pts.len();
        // reject duplicates of existing vertices
        let t0 = match loc {
            Location::Inside(t) | Location::OnEdge(t, _) => t,
        };
        if self.tris[t0]
            .iter()
            .any(|&w| self.pts[w].dist(p) * self.pts[w].dist(p) <= self.eps)
        {
            return Ok(());
        }
        self.pts.push(p);
        let mut stack = Vec::new();
        match loc {
            Location::Inside(t) => {
                let [a, b, c] = self.tris[t];
                let [na, nb, nc] = self.nbr[t];
                let t1 = self.tris.len();
                let t2 = t1 + 1;
                self.tris[t] = [a, b, v];
                self.tris.push([b, c, v]);
                self.tris.push([c, a, v]);
                self.nbr[t] = [Some(t1), Some(t2), nc];
                self.nbr.push([Some(t2), Some(t), na]);
                self.nbr.push([Some(t), Some(t1), nb]);
                self.set_nbr(na, t, t1);
                self.set_nbr(nb, t, t2);
                stack.extend([t, t1, t2]);
            }
            Location::OnEdge(t, i) => {
                // edge (u, w) opposite vertex tri[i]
                let tri = self.tris[t];
                let (o, u, w) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let n_ou = self.nbr[t][(i + 2) % 3];
                let n_wo = self.nbr[t][(i + 1) % 3];
                let other = self.nbr[t][i];
                let t1 = self.tris.len();
                // t: (o, u, v), t1: (o, v, w)
                self.tris[t] = [o, u, v];
                self.tris.push([o, v, w]);
                self.nbr.push([None, n_wo, Some(t)]);
                self.nbr[t] = [None, Some(t1), n_ou];
                self.set_nbr(n_wo, t, t1);
                stack.extend([t, t1]);
                if let Some(s) = other {
                    let st = self.tris[s];
                    let j = (0..3)
                        .find(|&k| st[k] != u && st[k] != w)
                        .expect("neighbor shares the edge");
                    let q = st[j];
                    // s has edge (w, u) opposite q: order (q, w, u)
                    let n_qw = self.nbr[s][(0..3).find(|&k| st[k] == u).unwrap()];
                    let n_uq = self.nbr[s][(0..3).find(|&k| st[k] == w).unwrap()];
                    let s1 = self.tris.len();
                    // s: (q, w, v), s1: (q, v, u)
                    self.tris[s] = [q, w, v];
                    self.tris.push([q, v, u]);
                    self.nbr[s] = [Some(t1), Some(s1), n_qw];
                    self.nbr.push([Some(t), n_uq, Some(s)]);
                    self.set_nbr(n_uq, s, s1);
                    self.nbr[t][0] = Some(s1);
                    self.nbr[t1][0] = Some(s);
                    stack.extend([s, s1]);
                } else if orient(self.pts[u], self.pts[w], p).abs() > self.eps {
                    return Err(Error::Degenerate(
                        "boundary point off the polygon edge".into(),
                    ));
                }
            }
        }
        self.legalize(stack, Some(v));
        Ok(())
    }

    /// Lawson flips; with `apex` set, only edges opposite that vertex are tested.
    fn legalize(&mut self, mut stack: Vec<usize>, apex: Option<usize>) {
        let mut guard = 0usize;
        while let Some(t) = stack.pop() {
            guard += 1;
            if guard > 200 * (self.tris.len() + 10) {
                break;
            }
            for i in 0..3 {
                if apex.is_some_and(|v| self.tris[t][i] != v) {
                    continue;
                }
                if let Some((a, b)) = self.try_flip(t, i) {
                    stack.push(a);
                    stack.push(b);
                    break;
                }
            }
        }
    }

    /// Flips the edge opposite vertex `i` of `t` when it is not locally
    /// Delaunay; returns the two new triangles.
    fn try_flip(&mut self, t: usize, i: usize) -> Option<(usize, usize)> {
        let s = self.nbr[t][i]?;
        let tri = self.tris[t];
        let (p, u, w) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
        let st = self.tris[s];
        let j = (0..3).find(|&k| st[k] != u && st[k] != w)?;
        let q = st[j];
        let (pp, pu, pw, pq) = (self.pts[p], self.pts[u], self.pts[w], self.pts[q]);
        let scale = pu.dist(pw).max(pp.dist(pq)).powi(2);
        if incircle(pp, pu, pw, pq) <= 1e-12 * scale * scale {
            return None;
        }
        // the quad p, u, q, w must be strictly convex for the flip
        if orient(pp, pu, pq) <= self.eps || orient(pp, pq, pw) <= self.eps {
            return None;
        }
        // neighbours: t = (p, u, w): across (p,u) is nbr[t][idx of w], across (w,p) is nbr[t][idx of u]
        let n_pu = self.nbr[t][(i + 2) % 3];
        let n_wp = self.nbr[t][(i + 1) % 3];
        let n_uq = self.nbr[s][(0..3).find(|&k| st[k] == w).unwrap()];
        let n_qw = self.nbr[s][(0..3).find(|&k| st[k] == u).unwrap()];
        // t = (p, u, q), s = (p, q, w)
        self.tris[t] = [p, u, q];
        self.tris[s] = [p, q, w];
        self.nbr[t] = [n_uq, Some(s), n_pu];
        self.nbr[s] = [n_qw, n_wp, Some(t)];
        self.set_nbr(n_uq, s, t);
        self.set_nbr(n_wp, t, s);
        Some((t, s))
    }

    /// One pass of flips over all edges.
    fn delaunay_pass(&mut self) -> usize {
        let mut flips = 0;
        for t in 0..self.tris.len() {
            for i in 0..3 {
                if self.try_flip(t, i).is_some() {
                    flips += 1;
                    break;
                }
            }
        }
        flips
    }
}

/// Unstructured mesh of a convex polygon with edges of length about `h`;
/// refinement caps circumradii at `0.75 h`, so no edge exceeds `1.5 h`.
///
/// The mesh is built in a frame attached to the polygon (first vertex at the
/// origin, first edge along the x axis, unit diameter) and mapped back, so
/// similar polygons with the same vertex order get similar meshes.
pub fn mesh_polygon(poly: &ConvexPolygon, h: f64) -> Result<TriangleMesh> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    let v = poly.vertices();
    let (origin, dir) = (v[0], v[1].sub(v[0]));
    let theta = dir.y.atan2(dir.x);
    let d = poly.diameter();
    let (sn, cs) = theta.sin_cos();
    let canonical: Vec<Point> = v
        .iter()
        .map(|p| {
            let q = p.sub(origin);
            Point::new((cs * q.x + sn * q.y) / d, (-sn * q.x + cs * q.y) / d)
        })
        .collect();
    let local = mesh_canonical(&ConvexPolygon::new(canonical)?, h / d)?;
    let nodes = local
        .nodes
        .iter()
        .map(|q| {
            Point::new(
                d * (cs * q.x - sn * q.y) + origin.x,
                d * (sn * q.x + cs * q.y) + origin.y,
            )
        })
        .collect();
    TriangleMesh::new(nodes, local.triangles)
}

fn mesh_canonical(poly: &ConvexPolygon, h: f64) -> Result<TriangleMesh> {
    let g_diam = poly.diameter();
    let h = h.min(g_diam);
    let mut b = Builder::from_fan(poly, g_diam);
    // the walk in point location relies on a Delaunay starting triangulation
    for _ in 0..(4 * poly.len()) {
        if b.delaunay_pass() == 0 {
            break;
        }
    }
    let verts = poly.vertices().to_vec();
    let n = verts.len();

    // boundary subdivision
    let mut boundary = Vec::new();
    for k in 0..n {
        let (a, c) = (verts[k], verts[(k + 1) % n]);
        let m = (a.dist(c) / h).ceil().max(1.0) as usize;
        for s in 1..m {
            boundary.push(a.lerp(c, s as f64 / m as f64));
        }
    }
    // interior triangular lattice kept at least h/2 away from every edge
    let mut interior = Vec::new();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in &verts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let dy = h * 0.75f64.sqrt();
    let rows = ((y1 - y0) / dy).ceil() as usize + 1;
    let cols = ((x1 - x0) / h).ceil() as usize + 2;
    for r in 0..rows {
        let y = y0 + r as f64 * dy;
        let shift = if r % 2 == 1 { 0.5 * h } else { 0.0 };
        for c in 0..cols {
            let p = Point::new(x0 + shift + c as f64 * h, y);
            let clearance = poly
                .edges()
                .map(|(a, q)| orient(a, q, p) / a.dist(q))
                .fold(f64::INFINITY, f64::min);
            if clearance >= 0.55 * h {
                interior.push(p);
            }
        }
    }
    for p in boundary {
        b.insert(p)?;
    }
    for p in interior {
        b.insert(p)?;
    }
    refine_quality(&mut b, poly, h)?;
    let is_boundary: Vec<bool> = b
        .pts
        .iter()
        .map(|&p| {
            poly.edges()
                .any(|(a, q)| (orient(a, q, p) / a.dist(q)).abs() <= 1e-12 * g_diam)
        })
        .collect();
    smooth(&mut b, &is_boundary, 6);
    for _ in 0..20 {
        if b.delaunay_pass() == 0 {
            break;
        }
    }
    TriangleMesh::new(b.pts, b.tris)
}

/// Angle below which a triangle is refined, in degrees.
const REFINE_ANGLE: f64 = 20.7;
/// Circumradius, relative to the target size, above which a triangle is refined.
const REFINE_RADIUS: f64 = 0.75;

fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d)
}

/// Delaunay refinement: inserts circumcenters of triangles with a small
/// angle or a large circumradius; a circumcenter that encroaches on a
/// boundary segment (lies in its diametral disk) splits that segment at its
/// midpoint instead. Triangles whose small angle sits in a sharp polygon
/// corner are left alone, and the number of insertions is capped.
fn refine_quality(b: &mut Builder, poly: &ConvexPolygon, h: f64) -> Result<()> {
    let corners: Vec<(Point, f64)> = {
        let v = poly.vertices();
        let n = v.len();
        (0..n)
            .map(|i| {
                let (a, p, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                let d1 = a.sub(p);
                let d2 = c.sub(p);
                (p, d1.cross(d2).abs().atan2(d1.dot(d2)).to_degrees())
            })
            .collect()
    };
    let sharp_corner = |p: Point| {
        corners
            .iter()
            .any(|&(q, ang)| q == p && ang < 2.0 * REFINE_ANGLE + 5.0)
    };
    let cap = 4 * b.pts.len() + 1000;
    let mut inserted = 0;
    let mut skip: Vec<bool> = vec![false; b.tris.len()];
    let mut t = 0;
    while t < b.tris.len() && inserted < cap {
        if skip.len() < b.tris.len() {
            skip.resize(b.tris.len(), false);
        }
        if skip[t] {
            t += 1;
            continue;
        }
        let tri = b.tris[t];
        let p = tri.map(|v| b.pts[v]);
        let angle = min_triangle_angle(p);
        let c = circumcenter(p[0], p[1], p[2]);
        let radius = c.dist(p[0]);
        let small = angle < REFINE_ANGLE && {
            // vertex carrying the smallest angle
            let k = (0..3)
                .min_by(|&i, &j| {
                    let ang = |k: usize| {
                        let d1 = p[(k + 1) % 3].sub(p[k]);
                        let d2 = p[(k + 2) % 3].sub(p[k]);
                        d1.cross(d2).abs().atan2(d1.dot(d2))
                    };
                    ang(i).total_cmp(&ang(j))
                })
                .unwrap();
            !sharp_corner(p[k])
        };
        if !(small || radius > REFINE_RADIUS * h) {
            t += 1;
            continue;
        }
        // boundary segments encroached by the circumcenter, or the one it lies beyond
        let mut split: Option<(usize, usize)> = None;
        for (s, tri_s) in b.tris.iter().enumerate() {
            for i in 0..3 {
                if b.nbr[s][i].is_some() {
                    continue;
                }
                let (u, w) = (tri_s[(i + 1) % 3], tri_s[(i + 2) % 3]);
                let (pu, pw) = (b.pts[u], b.pts[w]);
                if pu.sub(c).dot(pw.sub(c)) < 0.0 || orient(pu, pw, c) < 0.0 {
                    split = Some((u, w));
                    break;
                }
            }
            if split.is_some() {
                break;
            }
        }
        let before = b.pts.len();
        match split {
            Some((u, w)) => b.insert(b.pts[u].lerp(b.pts[w], 0.5))?,
            None => b.insert(c)?,
        }
        if b.pts.len() == before {
            skip[t] = true;
            t += 1;
        } else {
            inserted += 1;
            t = 0;
        }
    }
    Ok(())
}

/// Guarded Laplacian smoothing: an interior node moves to the centroid of its
/// neighbours only if every incident triangle stays positively oriented and
/// the worst incident angle does not get worse.
fn smooth(b: &mut Builder, is_boundary: &[bool], sweeps: usize) {
    let n = b.pts.len();
    for _ in 0..sweeps {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, tri) in b.tris.iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        for v in 0..n {
            if is_boundary[v] || incident[v].is_empty() {
                continue;
            }
            let mut sum = Point::new(0.0, 0.0);
            let mut count = 0.0;
            for &t in &incident[v] {
                for &w in &b.tris[t] {
                    if w != v {
                        sum = sum.add(b.pts[w]);
                        count += 1.0;
                    }
                }
            }
            let target = sum.scale(1.0 / count);
            let worst = |pts: &[Point]| -> Option<f64> {
                let mut m = f64::INFINITY;
                for &t in &incident[v] {
                    let p = b.tris[t].map(|w| pts[w]);
                    if orient(p[0], p[1], p[2]) <= b.eps {
                        return None;
                    }
                    m = m.min(min_triangle_angle(p));
                }
                Some(m)
            };
            let before = worst(&b.pts).unwrap_or(0.0);
            let old = b.pts[v];
            b.pts[v] = target;
            match worst(&b.pts) {
                Some(after) if after >= before - 1e-9 => {}
                _ => b.pts[v] = old,
            }
        }
        for _ in 0..4 {
            if b.delaunay_pass() == 0 {
                break;
            }
        }
    }
}

/// Options for structured meshes of thin domains.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThinMeshOptions {
    /// Number of cells in `x` (profile knots are added).
    pub columns: usize,
    /// Number of cell layers across the thickness.
    pub layers: usize,
    /// Cluster columns towards both ends with a cosine law.
    pub graded: bool,
}

impl Default for ThinMeshOptions {
    fn default() -> Self {
        ThinMeshOptions {
            columns: 64,
            layers: 4,
            graded: false,
        }
    }
}

/// Structured mesh of `{0 <= x <= 1, -eps h_minus <= y <= eps h_plus}`:
/// columns at fixed `x`, each split into `layers` equal cells; columns of
/// zero height collapse to one node and their neighbouring cells to a fan.
pub fn mesh_thin(
    hplus: &Profile,
    hminus: &Profile,
    eps: f64,
    opts: ThinMeshOptions,
) -> Result<TriangleMesh> {
    if opts.columns < 2 || opts.layers < 1 {
        return Err(Error::InvalidArgument(
            "thin mesh needs at least 2 columns and 1 layer".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    let mut xs: Vec<f64> = (0..=opts.columns)
        .map(|i| {
            let s = i as f64 / opts.columns as f64;
            if opts.graded {
                0.5 * (1.0 - (std::f64::consts::PI * s).cos())
            } else {
                s
            }
        })
        .chain(hplus.knots().iter().copied())
        .chain(hminus.knots().iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let l = opts.layers;
    let mut nodes = Vec::new();
    let mut column_nodes: Vec<Vec<usize>> = Vec::with_capacity(xs.len());
    for &x in &xs {
        let lo = -eps * hminus.eval(x);
        let hi = eps * hplus.eval(x);
        let height = hi - lo;
        if height < 0.0 {
            return Err(Error::InvalidArgument(format!("profiles cross at x = {x}")));
        }
        let first = nodes.len();
        if height <= 1e-14 * eps {
            nodes.push(Point::new(x, 0.5 * (lo + hi)));
            column_nodes.push(vec![first; l + 1]);
        } else {
            for j in 0..=l {
                nodes.push(Point::new(x, lo + height * j as f64 / l as f64));
            }
            column_nodes.push((first..=first + l).collect());
        }
    }
    let mut triangles = Vec::new();
    for c in 0..xs.len() - 1 {
        let (left, right) = (&column_nodes[c], &column_nodes[c + 1]);
        for j in 0..l {
            let (a, b, cc, d) = (left[j], right[j], right[j + 1], left[j + 1]);
            // quad a (bottom-left), b (bottom-right), cc (top-right), d (top-left)
            let candidates = if nodes[a].dist(nodes[cc]) <= nodes[b].dist(nodes[d]) {
                [[a, b, cc], [a, cc, d]]
            } else {
                [[a, b, d], [b, cc, d]]
            };
            for t in candidates {
                if t[0] != t[1]
                    && t[1] != t[2]
                    && t[2] != t[0]
                    && orient(nodes[t[0]], nodes[t[1]], nodes[t[2]]) > 0.0
                {
                    triangles.push(t);
                }
            }
        }
    }
    TriangleMesh::new(nodes, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{named, random_hull, NamedShape};

    fn check(mesh: &TriangleMesh, poly: &ConvexPolygon) {
        assert!((mesh.area() - poly.area()).abs() < 1e-12 * poly.area().max(1.0));
        assert!((mesh.boundary_length() - poly.perimeter()).abs() < 1e-12 * poly.perimeter());
        assert!(mesh.boundary_is_closed_chain());
        for e in &mesh.boundary_edges {
            for &v in e {
                assert!(poly.contains(mesh.nodes[v], 1e-12));
            }
        }
    }

    #[test]
    fn square_mesh_invariants() {
        let sq = named(NamedShape::Square).unwrap();
        let m = mesh_polygon(&sq, 0.1).unwrap();
        check(&m, &sq);
        let q = m.quality();
        assert!(q.min_angle >= MIN_ANGLE_TARGET, "{q:?}");
        assert!(q.h_max <= 0.1 * 1.5 + 1e-12, "{q:?}");
    }

    #[test]
    fn triangle_meshes() {
        for shape in [NamedShape::T1, NamedShape::T2, NamedShape::Disk(64)] {
            let p = named(shape).unwrap();
            let m = mesh_polygon(&p, 0.05).unwrap();
            check(&m, &p);
            assert!(
                m.quality().min_angle >= MIN_ANGLE_TARGET,
                "{shape:?}: {:?}",
                m.quality()
            );
        }
    }

    #[test]
    fn random_hulls_mesh() {
        for seed in 0..40 {
            let p = random_hull(15, seed).unwrap();
            let m = mesh_polygon(&p, 0.05).unwrap();
            check(&m, &p);
            let q = m.quality();
            if q.corner_limit >= 2.0 * REFINE_ANGLE + 5.0 {
                assert!(q.min_angle >= MIN_ANGLE_TARGET, "seed {seed}: {q:?}");
            }
        }
    }

    #[test]
    fn refinement_quadruples() {
        let p = named(NamedShape::T1).unwrap();
        let m = mesh_polygon(&p, 0.2).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        assert_eq!(r.boundary_edges.len(), 2 * m.boundary_edges.len());
        assert!((r.quality().h_max - 0.5 * m.quality().h_max).abs() < 1e-12);
        check(&r, &p);
    }

    #[test]
    fn thin_meshes_cover_domain() {
        let half = Profile::triangular(0.5).unwrap().scaled(0.5);
        let eps = 0.05;
        let m = mesh_thin(&half, &half, eps, ThinMeshOptions::default()).unwrap();
        assert!((m.area() - eps * 0.5).abs() < 1e-14);
        assert!(m.boundary_is_closed_chain());
        let rect = mesh_thin(
            &Profile::constant(1.0),
            &Profile::constant(0.0),
            0.1,
            ThinMeshOptions {
                graded: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((rect.area() - 0.1).abs() < 1e-14);
        assert!((rect.boundary_length() - 2.2).abs() < 1e-13);
    }
}
