//! Triangulating convex polygons: element count, longest edge and smallest
//! angle for a few shapes and sizes.

use spectral_lab::fem2d::mesh_polygon;
use spectral_lab::geom2d::{named, random_hull, NamedShape};

fn main() -> spectral_lab::Result<()> {
    let shapes = [
        ("square", named(NamedShape::Square)?),
        ("T1", named(NamedShape::T1)?),
        ("hull(15)", random_hull(15, 3)?),
    ];
    for (name, p) in shapes {
        for h in [0.1, 0.05, 0.025] {
            let m = mesh_polygon(&p, h)?;
            let q = m.quality();
            println!(
                "{name:<9} h {h:<6} triangles {:>5} h_max {:.4} min angle {:>5.1} deg  area error {:.1e}",
                m.triangles.len(),
                q.h_max,
                q.min_angle,
                (m.area() - p.area()).abs()
            );
        }
    }
    Ok(())
}
