//! Quadratic Lagrange elements: degrees of freedom and the matrices
//! `K` (stiffness), `M` (domain mass) and `B` (boundary mass).

use std::collections::HashMap;
use std::ops::{Add, Sub};

use super::mesh::TriangleMesh;
use crate::geom2d::Point;
use crate::linalg::{CsrMatrix, TripletBuilder};

/// Local numbering: corners 0, 1, 2, then midpoints of edges 01, 12, 20.
#[derive(Clone, Debug)]
pub struct P2Space {
    pub dofs: usize,
    pub coords: Vec<Point>,
    pub cells: Vec<[usize; 6]>,
    /// Boundary edges as `(start, end, midpoint)` dofs.
    pub boundary: Vec<[usize; 3]>,
}

impl P2Space {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let mut coords = mesh.nodes.clone();
        let mut edge_dof: HashMap<(usize, usize), usize> = HashMap::new();
        let mut dof_of = |u: usize, v: usize, coords: &mut Vec<Point>| -> usize {
            *edge_dof.entry((u.min(v), u.max(v))).or_insert_with(|| {
                coords.push(coords[u].lerp(coords[v], 0.5));
                coords.len() - 1
            })
        };
        let cells: Vec<[usize; 6]> = mesh
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let ab = dof_of(a, b, &mut coords);
                let bc = dof_of(b, c, &mut coords);
                let ca = dof_of(c, a, &mut coords);
                [a, b, c, ab, bc, ca]
            })
            .collect();
        let boundary = mesh
            .boundary_edges
            .iter()
            .map(|&[u, v]| [u, v, dof_of(u, v, &mut coords)])
            .collect();
        P2Space {
            dofs: coords.len(),
            coords,
            cells,
            boundary,
        }
    }
}

/// Gradients of the six basis functions at barycentric point `l`, given
/// the constant gradients `g` of the barycentric coordinates.
fn basis_gradients(l: [f64; 3], g: [Point; 3]) -> [Point; 6] {
    [
        g[0].scale(4.0 * l[0] - 1.0),
        g[1].scale(4.0 * l[1] - 1.0),
        g[2].scale(4.0 * l[2] - 1.0),
        g[0].scale(4.0 * l[1]).add(g[1].scale(4.0 * l[0])),
        g[1].scale(4.0 * l[2]).add(g[2].scale(4.0 * l[1])),
        g[2].scale(4.0 * l[0]).add(g[0].scale(4.0 * l[2])),
    ]
}

fn basis_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Six-point rule exact for polynomials of degree 4 on a triangle:
/// barycentric points and weights summing to 1.
fn quadrature() -> [([f64; 3], f64); 6] {
    let (a, wa) = (0.445948490915965, 0.223381589678011);
    let (b, wb) = (0.091576213509771, 0.109951743655322);
    let (ca, cb) = (1.0 - 2.0 * a, 1.0 - 2.0 * b);
    [
        ([a, a, ca], wa),
        ([a, ca, a], wa),
        ([ca, a, a], wa),
        ([b, b, cb], wb),
        ([b, cb, b], wb),
        ([cb, b, b], wb),
    ]
}

/// Element stiffness and mass matrices.
pub fn element_matrices(p: [Point; 3]) -> ([[f64; 6]; 6], [[f64; 6]; 6]) {
    let area2 = p[1].sub(p[0]).cross(p[2].sub(p[0]));
    let area = 0.5 * area2;
    // grad l_i = rot90(p_{i+2} - p_{i+1}) / (2 area), pointing towards vertex i
    let g = [0, 1, 2].map(|i| {
        let e = p[(i + 2) % 3].sub(p[(i + 1) % 3]);
        Point::new(-e.y / area2, e.x / area2)
    });
    let mut k = [[0.0; 6]; 6];
    let mut m = [[0.0; 6]; 6];
    for (l, w) in quadrature() {
        let gr = basis_gradients(l, g);
        let v = basis_values(l);
        for i in 0..6 {
            for j in 0..6 {
                k[i][j] += w * area * gr[i].dot(gr[j]);
                m[i][j] += w * area * v[i] * v[j];
            }
        }
    }
    (k, m)
}

/// Boundary mass of one quadratic edge `(start, end, midpoint)`.
pub fn edge_mass(length: f64) -> [[f64; 3]; 3] {
    let c = length / 30.0;
    [
        [4.0 * c, -c, 2.0 * c],
        [-c, 4.0 * c, 2.0 * c],
        [2.0 * c, 2.0 * c, 16.0 * c],
    ]
}

/// Assembled `K`, `M`, `B`.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary_mass: CsrMatrix,
}

pub fn assemble(space: &P2Space) -> Assembled {
    let n = space.dofs;
    let mut kb = TripletBuilder::with_capacity(n, 36 * space.cells.len());
    let mut mb = TripletBuilder::with_capacity(n, 36 * space.cells.len());
    for cell in &space.cells {
        let p = [
            space.coords[cell[0]],
            space.coords[cell[1]],
            space.coords[cell[2]],
        ];
        let (ke, me) = element_matrices(p);
        for i in 0..6 {
            for j in 0..6 {
                kb.add(cell[i], cell[j], ke[i][j]);
                mb.add(cell[i], cell[j], me[i][j]);
            }
        }
    }
    let mut bb = TripletBuilder::with_capacity(n, 9 * space.boundary.len());
    for e in &space.boundary {
        let be = edge_mass(space.coords[e[0]].dist(space.coords[e[1]]));
        for i in 0..3 {
            for j in 0..3 {
                bb.add(e[i], e[j], be[i][j]);
            }
        }
    }
    Assembled {
        stiffness: kb.build(),
        mass: mb.build(),
        boundary_mass: bb.build(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::mesh::mesh_polygon;
    use crate::geom2d::{named, NamedShape};
    use crate::linalg::dot;

    fn space() -> P2Space {
        P2Space::new(&mesh_polygon(&named(NamedShape::T1).unwrap(), 0.2).unwrap())
    }

    #[test]
    fn element_mass_sums_to_area() {
        let p = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.1),
            Point::new(0.3, 1.0),
        ];
        let (k, m) = element_matrices(p);
        let area = 0.5 * p[1].sub(p[0]).cross(p[2].sub(p[0]));
        let total: f64 = m.iter().flatten().sum();
        assert!((total - area).abs() < 1e-14);
        // constants are in the kernel of the stiffness
        for row in k {
            assert!(row.iter().sum::<f64>().abs() < 1e-13);
        }
        // closed form of the corner diagonal entry: 6 area / 180
        assert!((m[0][0] - area / 30.0).abs() < 1e-14);
        assert!((m[3][3] - 8.0 * area / 45.0).abs() < 1e-14);
    }

    #[test]
    fn global_quadratic_integrals() {
        let s = space();
        let a = assemble(&s);
        let f: Vec<f64> = s.coords.iter().map(|p| p.x * p.x).collect();
        let ones = vec![1.0; s.dofs];
        // int_T1 x^2 over the equilateral triangle of side 1 = 7 sqrt(3) / 96
        let exact = 7.0 * 3f64.sqrt() / 96.0;
        assert!((dot(&ones, &a.mass.mul_vec(&f)) - exact).abs() < 1e-14);
        // boundary integral of 1 is the perimeter
        assert!((dot(&ones, &a.boundary_mass.mul_vec(&ones)) - 3.0).abs() < 1e-14);
        // |grad x^2|^2 = 4 x^2
        assert!((dot(&f, &a.stiffness.mul_vec(&f)) - 4.0 * exact).abs() < 1e-13);
        assert!(a.stiffness.asymmetry() < 1e-14);
    }

    #[test]
    fn boundary_quadratic_integral() {
        let s = space();
        let a = assemble(&s);
        let f: Vec<f64> = s.coords.iter().map(|p| p.y).collect();
        let ones = vec![1.0; s.dofs];
        // int over the boundary of y: two slanted sides of length 1 with mean height sqrt(3)/4
        let exact = 2.0 * 3f64.sqrt() / 4.0;
        assert!((dot(&ones, &a.boundary_mass.mul_vec(&f)) - exact).abs() < 1e-14);
        // and of y^2
        let g: Vec<f64> = s.coords.iter().map(|p| p.y * p.y).collect();
        assert!((dot(&ones, &a.boundary_mass.mul_vec(&g)) - 2.0 * 0.75 / 3.0).abs() < 1e-14);
    }
}
