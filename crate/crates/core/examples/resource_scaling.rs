//! Qubit counts, depth and CNOT estimates versus problem size, and what the
//! CNOT count implies for fidelity at 0.92 per gate.

use qpoisson::cli::{resources, ExperimentConfig, ModeChoice};

fn main() -> qpoisson::Result<()> {
    for mode in [ModeChoice::Explicit, ModeChoice::Fused] {
        let cfg = ExperimentConfig { f: 4, l: 10, mode, ..ExperimentConfig::default() };
        println!("{mode:?}");
        for row in resources(&cfg, &[3, 7, 15])? {
            let r = &row.report;
            println!(
                "  {:>6}: {:>2} qubits (B {} / E {} / A {}), depth {:>6}, ~{:>6} CNOTs, fidelity 10^{:.1}{}",
                row.problem,
                r.total_qubits,
                r.reg_b,
                r.reg_e,
                r.reg_a,
                r.depth,
                r.estimated_cnots,
                r.fidelity_log10,
                if r.washed_out { " (washed out)" } else { "" }
            );
        }
    }
    Ok(())
}
