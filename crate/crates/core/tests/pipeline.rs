use std::f64::consts::PI;

use spectral_lab::bounds::per_domain_upper_bound;
use spectral_lab::diagram::{
    campaign_metadata, csv_string, run_campaign, Campaign, Family, MeshPolicy,
};
use spectral_lab::fem2d::{f_of_domain, thin_sweep, ThinMeshOptions};
use spectral_lab::geom2d::{named, rectangle, ConvexPolygon, NamedShape, Point};
use spectral_lab::profiles::Profile;
use spectral_lab::sl1d::{f_of_h, DEFAULT_ELEMENTS};

#[test]
fn f_is_invariant_under_similarity() {
    let t1 = named(NamedShape::T1).unwrap();
    let moved = t1.transformed(3.0, 0.7, Point::new(-2.0, 5.0)).unwrap();
    let a = f_of_domain(&t1, 0.05).unwrap();
    let b = f_of_domain(&moved, 0.05).unwrap();
    assert!((a.f - b.f).abs() < 1e-6, "{} vs {}", a.f, b.f);
    assert!((b.mu1 * 9.0 - a.mu1).abs() / a.mu1 < 1e-6);
    assert!((b.sigma1 * 3.0 - a.sigma1).abs() / a.sigma1 < 1e-6);
}

#[test]
fn rectangle_neumann_matches_separation_of_variables() {
    let r = f_of_domain(&rectangle(2.0, 1.0).unwrap(), 0.03).unwrap();
    assert!(
        (r.mu1 - PI * PI / 4.0).abs() / (PI * PI / 4.0) < 1e-5,
        "{}",
        r.mu1
    );
}

#[test]
fn thin_rectangle_neumann_equals_one_dimensional_value() {
    let sweep = thin_sweep(
        &Profile::constant(1.0),
        &Profile::constant(0.0),
        &[0.2, 0.1, 0.05],
        ThinMeshOptions::default(),
    )
    .unwrap();
    for row in &sweep.rows {
        assert!(
            (row.mu1 - PI * PI).abs() / (PI * PI) < 1e-3,
            "eps {} mu1 {}",
            row.eps,
            row.mu1
        );
    }
    assert!((sweep.mu1_1d - PI * PI).abs() < 1e-8);
}

#[test]
fn profile_and_polygon_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = Profile::triangular(0.3).unwrap().scaled(0.7);
    let hp = dir.path().join("h.json");
    h.save(&hp).unwrap();
    let back = Profile::from_spec(hp.to_str().unwrap()).unwrap();
    assert_eq!(
        f_of_h(&h, DEFAULT_ELEMENTS).unwrap().f,
        f_of_h(&back, DEFAULT_ELEMENTS).unwrap().f
    );

    let poly = named(NamedShape::T2).unwrap();
    let pp = dir.path().join("p.json");
    poly.save(&pp).unwrap();
    let loaded = ConvexPolygon::from_spec(pp.to_str().unwrap()).unwrap();
    assert_eq!(poly.vertices(), loaded.vertices());
}

#[test]
fn named_shapes_respect_per_domain_bound() {
    for shape in [
        NamedShape::T1,
        NamedShape::T2,
        NamedShape::Square,
        NamedShape::Rectangle(4.0, 1.0),
    ] {
        let poly = named(shape).unwrap();
        let bound = per_domain_upper_bound(&poly.functionals()).unwrap();
        let r = f_of_domain(&poly, 0.05).unwrap();
        assert!(r.f <= bound, "{shape:?}: F {} > bound {bound}", r.f);
        assert!((1.0..=2.0).contains(&r.f), "{shape:?}: F {}", r.f);
    }
}

#[test]
fn campaign_csv_is_deterministic() {
    let c = Campaign {
        family: Family::RandomPolygon,
        samples: 4,
        seed: 11,
        mesh: MeshPolicy {
            h_rel: 0.08,
            min_across: 4,
        },
    };
    let meta = campaign_metadata(&c);
    let a = csv_string(&run_campaign(&c).unwrap().points, &meta);
    let b = csv_string(&run_campaign(&c).unwrap().points, &meta);
    assert_eq!(a, b);
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 5);
}
