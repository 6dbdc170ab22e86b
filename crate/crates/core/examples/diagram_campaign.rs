//! A small diagram campaign over random convex polygons, with CSV and SVG
//! written to the temporary directory.

use spectral_lab::cli::sig12;
use spectral_lab::diagram::{
    campaign_metadata, conjecture_report, emit_csv, emit_svg_scatter, run_campaign, Campaign,
    Family, MeshPolicy, SvgStyle,
};

fn main() -> spectral_lab::Result<()> {
    let c = Campaign {
        family: Family::RandomPolygon,
        samples: 24,
        seed: 7,
        mesh: MeshPolicy::default(),
    };
    let res = run_campaign(&c)?;
    let rep = conjecture_report(&res.points)?;
    println!(
        "{} points, {} failures, {} hard violations",
        res.points.len(),
        res.failures.len(),
        res.hard_violations()
    );
    println!(
        "F in [{}, {}], outside [1, 2]: {}",
        sig12(rep.min_f.f),
        sig12(rep.max_f.f),
        rep.below_one + rep.above_two
    );
    let dir = std::env::temp_dir();
    emit_csv(&res.points, &campaign_metadata(&c), dir.join("diagram.csv"))?;
    emit_svg_scatter(&res.points, dir.join("diagram.svg"), SvgStyle::default())?;
    println!("wrote {}", dir.join("diagram.{csv,svg}").display());
    Ok(())
}
