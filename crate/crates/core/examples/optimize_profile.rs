//! Pattern search for the smallest and largest F over concave profiles.

use spectral_lab::cli::sig12;
use spectral_lab::variations::{optimize_f, Mode, OptimizeOptions};

fn main() -> spectral_lab::Result<()> {
    for mode in [Mode::Min, Mode::Max] {
        let opts = OptimizeOptions {
            mode,
            knots: 11,
            restarts: 4,
            start_constant: true,
            ..Default::default()
        };
        let r = optimize_f(&opts)?;
        println!("{mode:?}: best F {}", sig12(r.best_value));
        for run in &r.runs {
            println!(
                "  from {:<16} -> {} after {} evaluations",
                run.start,
                sig12(run.best_value),
                run.evaluations
            );
        }
        let v: Vec<String> = r
            .best_profile
            .values()
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect();
        println!("  best profile values: {}", v.join(" "));
    }
    Ok(())
}
