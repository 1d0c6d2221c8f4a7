//! Finite-shot measurement of the ancilla and reg B with post-selection.
//!
//!     cargo run --example shot_sampling -- 100000 7

use qpoisson::analytics::relative_error;
use qpoisson::circuit::{build_pipeline, RotationMode};
use qpoisson::cli::preset;
use qpoisson::encoding::FixedPointFormat;
use qpoisson::model::exact_solve;
use qpoisson::simulator::sample;

fn main() -> qpoisson::Result<()> {
    let mut args = std::env::args().skip(1);
    let shots = args.next().and_then(|a| a.parse().ok()).unwrap_or(1_000_000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);

    let system = preset("table1-3x3")?;
    let circuit = build_pipeline(&system, &FixedPointFormat::for_grid(2, 4, 10)?, RotationMode::Explicit)?;
    let result = sample(&circuit, shots, seed)?;
    println!("{} of {shots} shots kept ({:.4}%)", result.kept, 100.0 * result.success_prob);
    print!("{}", result.histogram_csv()?);
    println!("estimate {:.4?}", result.solution);
    println!("relative error {:.3}%", 100.0 * relative_error(&exact_solve(&system)?, &result.solution)?);
    Ok(())
}
