//! Text listing of the smallest solver circuit.

use qpoisson::analytics::resource_report;
use qpoisson::circuit::{build_pipeline, RotationMode};
use qpoisson::encoding::FixedPointFormat;
use qpoisson::model::PoissonSystem;

fn main() -> qpoisson::Result<()> {
    let system = PoissonSystem::one_dim(1, vec![1.0])?;
    let circuit = build_pipeline(&system, &FixedPointFormat::for_grid(1, 0, 6)?, RotationMode::Explicit)?;
    print!("{}", circuit.dump());
    let report = resource_report(&circuit);
    println!("# gates {:?}", report.gate_counts);
    println!("# depth {} cnots~{}", report.depth, report.estimated_cnots);
    Ok(())
}
