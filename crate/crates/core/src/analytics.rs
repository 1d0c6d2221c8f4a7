//! Error metrics, success probabilities and circuit resource estimates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::encoding::AngleTable;
use crate::error::{Error, Result};
use crate::model::EigenData;
use crate::noise::{fidelity_estimate, fidelity_log10, is_washed_out, REFERENCE_CNOT_ACCURACY};
use crate::simulator::RunResult;

/// `‖exact − approx‖₂ / ‖exact‖₂`.
pub fn relative_error(exact: &[f64], approx: &[f64]) -> Result<f64> {
    if exact.len() != approx.len() {
        return Err(Error::InvalidInput(format!(
            "vectors have lengths {} and {}",
            exact.len(),
            approx.len()
        )));
    }
    let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidInput("reference vector is zero".into()));
    }
    let diff = exact.iter().zip(approx).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(diff / norm)
}

/// `100·Σ_j 1/λ_j²` (normalizing constant 1), in percent.
pub fn analytic_success_probability(lambdas: &[f64]) -> Result<f64> {
    if let Some(bad) = lambdas.iter().find(|&&l| l.is_nan() || l < 1.0) {
        return Err(Error::Domain(format!("eigenvalue {bad} is below 1")));
    }
    Ok(100.0 * lambdas.iter().map(|l| 1.0 / (l * l)).sum::<f64>())
}

/// `100·Σ_j β_j² sin²(π ω̂_j)`: the exact probability of the ancilla reading 1,
/// in percent.
pub fn expected_success_probability(eigs: &EigenData, table: &AngleTable) -> f64 {
    100.0
        * eigs
            .betas
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let s = (PI * table.quantized_omega(j)).sin();
                b * b * s * s
            })
            .sum::<f64>()
}

/// Kept-shot fraction of a sampled run, in percent.
pub fn empirical_success_probability(result: &RunResult) -> Result<f64> {
    if result.shots == 0 {
        return Err(Error::InvalidInput("result was not sampled".into()));
    }
    Ok(100.0 * result.kept as f64 / result.shots as f64)
}

/// Magnitudes of `Σ_j β_j sin(π ω̂_j) u_j`, normalized: what the post-selected
/// register holds when phase estimation is exact.
pub fn predicted_solution(eigs: &EigenData, table: &AngleTable) -> Vec<f64> {
    let dim = eigs.len();
    let mut v = vec![0.0; dim];
    for j in 0..dim {
        let w = eigs.betas[j] * (PI * table.quantized_omega(j)).sin();
        for (k, x) in v.iter_mut().enumerate() {
            *x += w * eigs.eigvecs[(k, j)];
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x.abs() / norm).collect()
}

/// Estimated decomposition of one gate into two-qubit and single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GateCost {
    pub two_qubit: u64,
    pub one_qubit: u64,
}

impl GateCost {
    const fn new(two_qubit: u64, one_qubit: u64) -> Self {
        Self { two_qubit, one_qubit }
    }

    /// Sequential layers the gate occupies on each of its qubits.
    pub fn duration(&self) -> u64 {
        (self.two_qubit + self.one_qubit).max(1)
    }
}

/// Multi-controlled X: `2c² − 2c + 1` two-qubit gates for `c ≥ 2` controls
/// (ancilla-free quadratic construction).
fn mcx_cost(controls: usize) -> GateCost {
    let c = controls as u64;
    match c {
        0 => GateCost::new(0, 1),
        1 => GateCost::new(1, 0),
        _ => GateCost::new(2 * c * c - 2 * c + 1, 0),
    }
}

/// Estimator rules used by [`resource_report`].
pub fn gate_cost(gate: &Gate) -> GateCost {
    match gate {
        Gate::Hadamard(_) | Gate::PauliX(_) | Gate::Ry { .. } | Gate::Phase { .. } => GateCost::new(0, 1),
        Gate::ControlledPhase { .. } => GateCost::new(2, 3),
        Gate::Swap(..) => GateCost::new(3, 0),
        Gate::MultiControlledX { controls, .. } => mcx_cost(controls.len()),
        Gate::MultiControlledRy { controls, .. } => {
            if controls.is_empty() {
                GateCost::new(0, 1)
            } else {
                // Ry(θ/2) · MCX · Ry(−θ/2) · MCX
                GateCost::new(2 * mcx_cost(controls.len()).two_qubit.max(1), 2)
            }
        }
        Gate::ControlledUnitary { controls, targets, .. } => {
            // Dense unitary on t targets: 4^t two-qubit gates, an
            // order-of-magnitude bound that ignores the control overhead.
            let t = targets.len() as u32;
            if t == 1 && controls.is_empty() {
                GateCost::new(0, 1)
            } else {
                GateCost::new(4u64.pow(t), 0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub total_qubits: usize,
    pub reg_b: usize,
    pub reg_e: usize,
    pub reg_a: usize,
    pub ancilla: usize,
    pub gate_counts: BTreeMap<String, u64>,
    pub depth: u64,
    pub estimated_cnots: u64,
    pub estimated_one_qubit: u64,
    pub estimated_fidelity: f64,
    pub fidelity_log10: f64,
    pub washed_out: bool,
}

/// Counts gates, estimates CNOTs with [`gate_cost`] and schedules greedily:
/// each gate starts once all its qubits are free and occupies them for its
/// decomposed length.
pub fn resource_report(circuit: &Circuit) -> ResourceReport {
    let mut gate_counts = BTreeMap::new();
    let mut ready = vec![0u64; circuit.num_qubits()];
    let mut cnots = 0;
    let mut singles = 0;
    for gate in circuit.gates() {
        *gate_counts.entry(gate.kind().to_string()).or_insert(0) += 1;
        let cost = gate_cost(gate);
        cnots += cost.two_qubit;
        singles += cost.one_qubit;
        let qubits = gate.qubits();
        let start = qubits.iter().map(|&q| ready[q]).max().unwrap_or(0);
        for q in qubits {
            ready[q] = start + cost.duration();
        }
    }
    let fidelity = fidelity_estimate(cnots, REFERENCE_CNOT_ACCURACY).expect("reference accuracy is valid");
    let l = &circuit.layout;
    ResourceReport {
        total_qubits: l.total(),
        reg_b: l.reg_b,
        reg_e: l.reg_e,
        reg_a: l.reg_a,
        ancilla: 1,
        gate_counts,
        depth: ready.into_iter().max().unwrap_or(0),
        estimated_cnots: cnots,
        estimated_one_qubit: singles,
        estimated_fidelity: fidelity,
        fidelity_log10: fidelity_log10(cnots, REFERENCE_CNOT_ACCURACY).expect("reference accuracy is valid"),
        washed_out: is_washed_out(fidelity),
    }
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub problem: String,
    pub f: u32,
    pub l: u32,
    pub mode: String,
    /// Percent.
    pub rel_error: f64,
    pub sp_expected: f64,
    pub sp_analytic_truncated: f64,
    pub sp_analytic_exact: f64,
    pub qubits: usize,
    pub depth: u64,
    pub cnots_est: u64,
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "problem",
    "f",
    "l",
    "mode",
    "rel_error",
    "sp_expected",
    "sp_analytic_truncated",
    "sp_analytic_exact",
    "qubits",
    "depth",
    "cnots_est",
];

/// Sweep rows as CSV with the fixed column order.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
