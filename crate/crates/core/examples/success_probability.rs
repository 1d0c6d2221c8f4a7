//! Analytic (Σ 1/λ²), spectral and simulated success probabilities.

use qpoisson::analytics::{analytic_success_probability, expected_success_probability};
use qpoisson::circuit::{build_pipeline, RotationMode};
use qpoisson::cli::preset;
use qpoisson::encoding::{build_angle_table, FixedPointFormat};
use qpoisson::model::eigenpairs;
use qpoisson::simulator::run_postselected;

fn main() -> qpoisson::Result<()> {
    for name in ["table1-3x3", "table1-7x7"] {
        let system = preset(name)?;
        let eigs = eigenpairs(&system)?;
        println!("{name}: exact-lambda analytic SP {:.4}%", analytic_success_probability(&eigs.lambdas)?);
        for f in [0, 4, 8] {
            let fmt = FixedPointFormat::for_grid(system.n(), f, 16)?;
            let table = build_angle_table(&eigs, &fmt)?;
            let run = run_postselected(&build_pipeline(&system, &fmt, RotationMode::Fused)?)?;
            println!(
                "  f={f}: truncated analytic {:.4}%  expected {:.4}%  simulated {:.4}%",
                analytic_success_probability(&table.effective_lambdas)?,
                expected_success_probability(&eigs, &table),
                100.0 * run.success_prob
            );
        }
    }
    Ok(())
}
