//! Phase estimation alone: feed eigenvectors (and a mixture) of the 3x3
//! problem and read the eigenvalue register.

use qpoisson::circuit::build_phase_verification;
use qpoisson::encoding::FixedPointFormat;
use qpoisson::model::{eigenpairs, PoissonSystem};
use qpoisson::simulator::run_exact;

fn main() -> qpoisson::Result<()> {
    let system = PoissonSystem::one_dim(2, vec![1.0, 0.0, 0.0])?;
    let fmt = FixedPointFormat::for_grid(2, 0, 10)?;
    let eigs = eigenpairs(&system)?;

    let mut inputs: Vec<(String, Vec<f64>)> = (1..=3).map(|j| (format!("u_{j}"), eigs.eigvec(j))).collect();
    inputs.push(("b = (1, 0, 0)".into(), vec![1.0, 0.0, 0.0]));

    for (name, v) in inputs {
        let mut amps = vec![0.0];
        amps.extend(v);
        let circuit = build_phase_verification(&system, &fmt, &amps)?;
        let probs = run_exact(&circuit)?.register_distribution(circuit.layout.e());
        print!("{name:>14}:");
        for (value, p) in probs.iter().enumerate().filter(|(_, p)| **p > 1e-12) {
            print!("  |{value:0w$b}> ({value}) p={p:.4}", w = fmt.m() as usize);
        }
        println!();
    }
    Ok(())
}
