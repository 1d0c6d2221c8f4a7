//! Readout noise on the sampled 3x3 input state and calibration-matrix
//! mitigation, over a few seeds.

use qpoisson::cli::{mitigate_demo, ExperimentConfig};

fn main() -> qpoisson::Result<()> {
    println!("seed  unmitigated  mitigated");
    for seed in 0..5 {
        let cfg = ExperimentConfig { shots: 100_000, seed, ..ExperimentConfig::with_preset("table1-3x3") };
        let r = mitigate_demo(&cfg)?;
        println!("{seed:>4}  {:>10.3}%  {:>8.3}%", r.rel_error_unmitigated, r.rel_error_mitigated);
    }
    Ok(())
}
