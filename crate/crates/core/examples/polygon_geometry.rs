//! Area, perimeter, diameter, width and inradius of convex polygons, and the
//! per-domain upper bound on F they give.

use spectral_lab::bounds::{per_domain_upper_bound, santalo_check};
use spectral_lab::cli::sig12;
use spectral_lab::geom2d::{named, random_hull, rectangle, NamedShape};

fn main() -> spectral_lab::Result<()> {
    let shapes = [
        ("T1", named(NamedShape::T1)?),
        ("T2", named(NamedShape::T2)?),
        ("disk(256)", named(NamedShape::Disk(256))?),
        ("rect 1x0.1", rectangle(1.0, 0.1)?),
        ("hull(15)", random_hull(15, 7)?),
    ];
    println!(
        "{:<11} {:>9} {:>9} {:>9} {:>9} {:>9} {:>10}",
        "shape", "area", "P", "D", "w", "r", "F bound"
    );
    for (name, p) in shapes {
        let g = p.functionals();
        let s = santalo_check(&g)?;
        println!(
            "{name:<11} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>10} {}",
            g.area,
            g.perimeter,
            g.diameter,
            g.width,
            g.inradius,
            sig12(per_domain_upper_bound(&g)?),
            if s.above_y2 { "" } else { "(2r/D below y2)" }
        );
    }
    Ok(())
}
