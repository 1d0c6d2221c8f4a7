//! The three benchmark presets at f = 8, l = 16 in fused mode, compared with
//! the classical solution.

use qpoisson::cli::{solve, ExperimentConfig, ModeChoice, PRESETS};

fn main() -> qpoisson::Result<()> {
    for name in PRESETS {
        let cfg = ExperimentConfig { f: 8, l: 16, mode: ModeChoice::Fused, ..ExperimentConfig::with_preset(name) };
        let r = solve(&cfg)?;
        println!("{name} ({} qubits, {} mode)", r.qubits, r.mode);
        println!("  quantum: {:.4?}", r.solution);
        println!("  exact:   {:.4?}", r.exact);
        println!("  relative error {:.4}%, success probability {:.4}%", r.rel_error, r.sp_simulated);
    }
    Ok(())
}
