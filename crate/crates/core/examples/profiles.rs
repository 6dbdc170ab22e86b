//! Concave profiles: construction, validation and projection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_lab::profiles::{project_concave, random_concave, uniform_knots, Profile};

fn main() -> spectral_lab::Result<()> {
    let tent = Profile::triangular(0.3)?;
    println!(
        "tent(0.3): integral {} peak {}",
        tent.integral(),
        tent.eval(0.3)
    );

    let star = Profile::parabolic_star(201)?;
    println!(
        "6x(1-x) sampled: integral {:.12} admissible {}",
        star.integral(),
        star.is_admissible()
    );

    // a noisy, non-concave input and its nearest concave profile
    let knots = uniform_knots(11);
    let raw: Vec<f64> = knots
        .iter()
        .enumerate()
        .map(|(i, x)| 1.0 + 0.3 * x + if i % 2 == 0 { 0.2 } else { -0.2 })
        .collect();
    let noisy = Profile::new(knots.clone(), raw.clone())?;
    println!("noisy violations: {}", noisy.validate().violations.len());
    let fixed = project_concave(&knots, &raw)?;
    println!(
        "projected: violations {} integral {}",
        fixed.validate().violations.len(),
        fixed.integral()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = random_concave(&mut rng, 8, true);
    println!(
        "random concave: {} knots, min {:.4}, integral {}",
        r.knots().len(),
        r.values().iter().cloned().fold(f64::INFINITY, f64::min),
        r.integral()
    );
    Ok(())
}
