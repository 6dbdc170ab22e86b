//! First nonzero Neumann and Steklov eigenvalues of convex polygons with
//! quadratic finite elements, the functional `F = mu_1 |Omega| / (sigma_1 P)`,
//! and sweeps over collapsing thin domains.
//!
//! Mesh sizes passed to [`f_of_domain`] are relative to the diameter, so the
//! same value gives the same resolution on dilated copies of a domain.

pub mod mesh;
pub mod p2;

use serde::Serialize;

use crate::geom2d::{thin_domain, ConvexPolygon};
use crate::linalg::{smallest_deflated, SubspaceOptions};
use crate::profiles::Profile;
use crate::{sl1d, Error, Result};

pub use mesh::{mesh_polygon, mesh_thin, MeshQuality, ThinMeshOptions, TriangleMesh};
pub use p2::{assemble, Assembled, P2Space};

/// Relative residual an eigenpair must reach.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EigenKind {
    Neumann,
    Steklov,
}

/// First nontrivial eigenvalue with solver diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair2D {
    pub eigenvalue: f64,
    pub kind: EigenKind,
    pub dofs: usize,
    pub h_max: f64,
    /// `|K x - l G x| / (|K x| + l |G x|)` with `G = M` or `B`.
    pub residual: f64,
    pub iterations: usize,
    /// Eigenvector in the P2 basis, unit norm in the `G` inner product.
    #[serde(skip)]
    pub vector: Vec<f64>,
}

/// A mesh with its P2 space and matrices, reusable for both problems.
pub struct Discretization {
    pub mesh: TriangleMesh,
    pub space: P2Space,
    pub matrices: Assembled,
    pub quality: MeshQuality,
}

impl Discretization {
    pub fn new(mesh: TriangleMesh) -> Self {
        let space = P2Space::new(&mesh);
        let matrices = assemble(&space);
        let quality = mesh.quality();
        Discretization {
            mesh,
            space,
            matrices,
            quality,
        }
    }

    fn diameter_estimate(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in &self.mesh.nodes {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        (x1 - x0).hypot(y1 - y0)
    }

    fn solve(&self, kind: EigenKind) -> Result<EigenPair2D> {
        let d = self.diameter_estimate();
        let (weight, shift) = match kind {
            EigenKind::Neumann => (&self.matrices.mass, 0.5 / (d * d)),
            EigenKind::Steklov => (
                &self.matrices.boundary_mass,
                0.1 / self.mesh.boundary_length(),
            ),
        };
        let ones = vec![1.0; self.space.dofs];
        let opts = SubspaceOptions {
            tol: 0.1 * RESIDUAL_TOL,
            shift,
            max_iter: 600,
            ..Default::default()
        };
        let sol = smallest_deflated(&self.matrices.stiffness, weight, &ones, &opts)?;
        if !(sol.residual <= RESIDUAL_TOL) {
            return Err(Error::NoConvergence {
                iterations: sol.iterations,
                residual: sol.residual,
            });
        }
        Ok(EigenPair2D {
            eigenvalue: sol.values[0],
            kind,
            dofs: self.space.dofs,
            h_max: self.quality.h_max,
            residual: sol.residual,
            iterations: sol.iterations,
            vector: sol.vector,
        })
    }

    pub fn neumann_mu1(&self) -> Result<EigenPair2D> {
        self.solve(EigenKind::Neumann)
    }

    pub fn steklov_sigma1(&self) -> Result<EigenPair2D> {
        self.solve(EigenKind::Steklov)
    }
}

/// `mu_1` on a given mesh.
pub fn neumann_mu1(mesh: &TriangleMesh) -> Result<EigenPair2D> {
    Discretization::new(mesh.clone()).neumann_mu1()
}

/// `sigma_1` on a given mesh.
pub fn steklov_sigma1(mesh: &TriangleMesh) -> Result<EigenPair2D> {
    Discretization::new(mesh.clone()).steklov_sigma1()
}

/// Geometry, eigenvalues and `F` of one domain.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalRecord {
    pub area: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub width: f64,
    pub inradius: f64,
    pub mu1: f64,
    pub sigma1: f64,
    /// `sigma_1 P`.
    pub x: f64,
    /// `mu_1 |Omega|`.
    pub y: f64,
    /// `y / x`.
    pub f: f64,
    pub dofs: usize,
    /// Longest mesh edge (absolute).
    pub hmax: f64,
    pub mu_residual: f64,
    pub sigma_residual: f64,
    pub min_angle: f64,
    pub quality_warning: bool,
}

/// Meshes `poly` with edge length `h_rel * diameter` and evaluates `F`.
pub fn f_of_domain(poly: &ConvexPolygon, h_rel: f64) -> Result<FunctionalRecord> {
    if !(h_rel > 0.0 && h_rel <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "relative mesh size must lie in (0, 1], got {h_rel}"
        )));
    }
    let g = poly.functionals();
    let mesh = mesh_polygon(poly, h_rel * g.diameter)?;
    let disc = Discretization::new(mesh);
    let mu = disc.neumann_mu1()?;
    let sigma = disc.steklov_sigma1()?;
    Ok(record(
        &disc,
        g.area,
        g.perimeter,
        g.diameter,
        g.width,
        g.inradius,
        &mu,
        &sigma,
    ))
}

#[allow(clippy::too_many_arguments)]
fn record(
    disc: &Discretization,
    area: f64,
    perimeter: f64,
    diameter: f64,
    width: f64,
    inradius: f64,
    mu: &EigenPair2D,
    sigma: &EigenPair2D,
) -> FunctionalRecord {
    let x = sigma.eigenvalue * perimeter;
    let y = mu.eigenvalue * area;
    FunctionalRecord {
        area,
        perimeter,
        diameter,
        width,
        inradius,
        mu1: mu.eigenvalue,
        sigma1: sigma.eigenvalue,
        x,
        y,
        f: y / x,
        dofs: disc.space.dofs,
        hmax: disc.quality.h_max,
        mu_residual: mu.residual,
        sigma_residual: sigma.residual,
        min_angle: disc.quality.min_angle,
        quality_warning: disc.quality.warning,
    }
}

/// One thickness of a thin-domain sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ThinRow {
    pub eps: f64,
    pub mu1: f64,
    pub sigma1: f64,
    /// `2 sigma_1 / eps`.
    pub scaled_sigma: f64,
    pub f: f64,
    pub dofs: usize,
}

/// Limits of a sweep next to the one-dimensional values for `h = h+ + h-`.
#[derive(Clone, Debug, Serialize)]
pub struct ThinSweep {
    pub rows: Vec<ThinRow>,
    pub mu1_limit: f64,
    pub scaled_sigma_limit: f64,
    pub f_limit: f64,
    pub mu1_1d: f64,
    pub sigma1_1d: f64,
    pub f_1d: f64,
}

impl ThinSweep {
    pub fn mu1_rel_error(&self) -> f64 {
        (self.mu1_limit / self.mu1_1d - 1.0).abs()
    }

    pub fn sigma_rel_error(&self) -> f64 {
        (self.scaled_sigma_limit / self.sigma1_1d - 1.0).abs()
    }

    pub fn f_rel_error(&self) -> f64 {
        (self.f_limit / self.f_1d - 1.0).abs()
    }
}

/// Value at 0 of the polynomial through `(x_i, y_i)` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

/// Number of smallest thicknesses used by the extrapolation.
pub const EXTRAPOLATION_POINTS: usize = 3;

/// Eigenvalues of `Omega_eps` for decreasing `eps`, polynomially extrapolated
/// to `eps = 0` through the last [`EXTRAPOLATION_POINTS`] thicknesses.
pub fn thin_sweep(
    hplus: &Profile,
    hminus: &Profile,
    eps: &[f64],
    opts: ThinMeshOptions,
) -> Result<ThinSweep> {
    if eps.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "thin sweep needs at least 3 thicknesses, got {}",
            eps.len()
        )));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(
            "thicknesses must be positive and strictly decreasing".into(),
        ));
    }
    let h = hplus.sum(hminus);
    let one_d = sl1d::f_of_h(&h, sl1d::DEFAULT_ELEMENTS)?;

    let rows: Vec<ThinRow> = eps
        .iter()
        .map(|&e| -> Result<ThinRow> {
            let poly = thin_domain(hplus, hminus, e)?;
            let disc = Discretization::new(mesh_thin(hplus, hminus, e, opts)?);
            let mu = disc.neumann_mu1()?;
            let sigma = disc.steklov_sigma1()?;
            let f = mu.eigenvalue * poly.area() / (sigma.eigenvalue * poly.perimeter());
            Ok(ThinRow {
                eps: e,
                mu1: mu.eigenvalue,
                sigma1: sigma.eigenvalue,
                scaled_sigma: 2.0 * sigma.eigenvalue / e,
                f,
                dofs: disc.space.dofs,
            })
        })
        .collect::<Result<_>>()?;

    let k = EXTRAPOLATION_POINTS.min(rows.len());
    let tail = &rows[rows.len() - k..];
    let xs: Vec<f64> = tail.iter().map(|r| r.eps).collect();
    let limit =
        |f: fn(&ThinRow) -> f64| extrapolate_to_zero(&xs, &tail.iter().map(f).collect::<Vec<_>>());
    Ok(ThinSweep {
        mu1_limit: limit(|r| r.mu1),
        scaled_sigma_limit: limit(|r| r.scaled_sigma),
        f_limit: limit(|r| r.f),
        mu1_1d: one_d.mu1,
        sigma1_1d: one_d.sigma1,
        f_1d: one_d.f,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{named, NamedShape, Point};
    use std::f64::consts::PI;

    #[test]
    fn neville_recovers_polynomials() {
        let xs = [0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn square_neumann_converges_from_above() {
        let sq = named(NamedShape::Square).unwrap();
        let mut prev = f64::INFINITY;
        for h in [0.4, 0.2, 0.1] {
            let m = mesh_polygon(&sq, h).unwrap();
            let mu = neumann_mu1(&m).unwrap();
            assert!(mu.eigenvalue >= PI * PI - 1e-9);
            assert!(mu.eigenvalue <= prev + 1e-12);
            assert!(mu.residual <= RESIDUAL_TOL);
            prev = mu.eigenvalue;
        }
        assert!((prev / (PI * PI) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn square_steklov_first_eigenvalue() {
        // no elementary closed form; check mesh convergence instead
        let sq = named(NamedShape::Square).unwrap();
        let coarse = steklov_sigma1(&mesh_polygon(&sq, 0.2).unwrap()).unwrap();
        let fine = steklov_sigma1(&mesh_polygon(&sq, 0.05).unwrap()).unwrap();
        assert!((coarse.eigenvalue - fine.eigenvalue).abs() < 1e-3 * fine.eigenvalue);
        assert!(fine.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn functional_is_invariant_under_similarities() {
        let t = named(NamedShape::T2).unwrap();
        let a = f_of_domain(&t, 0.1).unwrap();
        let moved = t.transformed(3.5, 0.7, Point::new(-2.0, 11.0)).unwrap();
        let b = f_of_domain(&moved, 0.1).unwrap();
        assert!((a.f - b.f).abs() < 1e-8, "{} vs {}", a.f, b.f);
        assert!((a.x - b.x).abs() < 1e-7 * a.x);
        assert!((a.y - b.y).abs() < 1e-7 * a.y);
    }

    #[test]
    fn bad_mesh_size_rejected() {
        let t = named(NamedShape::T1).unwrap();
        assert!(f_of_domain(&t, 0.0).is_err());
        assert!(f_of_domain(&t, 2.0).is_err());
    }
}
