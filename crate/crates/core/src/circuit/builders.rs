//! Builders for the solver pipeline and its fragments.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{invert_fragment, CMatrix, Circuit, CircuitMetadata, Gate, PhaseOracle, RegisterLayout, RotationMode};
use crate::encoding::{amplify_encode, build_angle_table, AngleTable, FixedPointFormat};
use crate::error::{Error, Result};
use crate::model::{eigenpairs, EigenData, PoissonSystem};

/// Largest pipeline the builders will emit by default (2^28 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub mode: RotationMode,
    pub oracle: PhaseOracle,
    pub max_qubits: usize,
}

impl PipelineOptions {
    pub fn new(mode: RotationMode) -> Self {
        Self { mode, oracle: PhaseOracle::Encoded, max_qubits: DEFAULT_MAX_QUBITS }
    }
}

fn one_dimensional(system: &PoissonSystem) -> Result<()> {
    if system.d() != 1 {
        return Err(Error::Unsupported(format!(
            "quantum circuits are built for d = 1 only; got d = {}",
            system.d()
        )));
    }
    Ok(())
}

/// Real orthogonal matrix whose first column is `target` (unit norm), built as
/// a Householder reflection.
fn first_column_unitary(target: &[f64]) -> CMatrix {
    let dim = target.len();
    let mut w: Vec<f64> = target.iter().map(|x| -x).collect();
    w[0] += 1.0;
    let ww: f64 = w.iter().map(|x| x * x).sum();
    if ww < 1e-30 {
        return CMatrix::identity(dim, dim);
    }
    CMatrix::from_fn(dim, dim, |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        Complex64::new(delta - 2.0 * w[r] * w[c] / ww, 0.0)
    })
}

/// Prepares `Σ_k amplitudes[k]|k⟩` on reg B from `|0…0⟩`.
pub fn state_preparation(amplitudes: &[f64], layout: &RegisterLayout) -> Result<Gate> {
    let dim = 1usize << layout.reg_b;
    if amplitudes.len() != dim {
        return Err(Error::InvalidInput(format!(
            "state has {} amplitudes, register holds {dim}",
            amplitudes.len()
        )));
    }
    let norm = amplitudes.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("input state has norm {norm}, expected 1")));
    }
    Ok(Gate::ControlledUnitary {
        controls: vec![],
        targets: layout.b().collect(),
        matrix: Arc::new(first_column_unitary(amplitudes)),
        label: "prep".into(),
    })
}

/// Quantum Fourier transform on `qubits` (little-endian), swaps included.
pub fn qft(qubits: &[usize]) -> Vec<Gate> {
    let m = qubits.len();
    let mut gates = Vec::new();
    for j in (0..m).rev() {
        gates.push(Gate::Hadamard(qubits[j]));
        for c in (0..j).rev() {
            gates.push(Gate::ControlledPhase {
                control: qubits[c],
                target: qubits[j],
                angle: PI / (1u64 << (j - c)) as f64,
            });
        }
    }
    for i in 0..m / 2 {
        gates.push(Gate::Swap(qubits[i], qubits[m - 1 - i]));
    }
    gates
}

pub fn inverse_qft(qubits: &[usize]) -> Vec<Gate> {
    invert_fragment(&qft(qubits))
}

/// `U^{2^k}` on reg B: `|0⟩` is left alone and the interior subspace gets
/// `Σ_j e^{iφ_j} u_j u_jᵀ`.
fn evolution_power(eigs: &EigenData, phases: &[f64], reg_b: usize) -> CMatrix {
    let dim = 1usize << reg_b;
    let mut u = CMatrix::zeros(dim, dim);
    u[(0, 0)] = Complex64::new(1.0, 0.0);
    for (j, &phase) in phases.iter().enumerate() {
        let z = Complex64::from_polar(1.0, phase);
        let v = eigs.eigvecs.column(j);
        for r in 0..v.len() {
            for c in 0..v.len() {
                u[(r + 1, c + 1)] += z * (v[r] * v[c]);
            }
        }
    }
    u
}

/// Phase estimation: Hadamards on reg E, controlled `U^{2^k}` from reg E qubit
/// `k` onto reg B, then the inverse QFT on reg E.
pub fn build_qpe(eigs: &EigenData, fmt: &FixedPointFormat, layout: &RegisterLayout) -> Result<Vec<Gate>> {
    build_qpe_with(eigs, fmt, layout, PhaseOracle::Encoded)
}

pub fn build_qpe_with(
    eigs: &EigenData,
    fmt: &FixedPointFormat,
    layout: &RegisterLayout,
    oracle: PhaseOracle,
) -> Result<Vec<Gate>> {
    let m = fmt.m();
    if layout.reg_e != m as usize {
        return Err(Error::InvalidInput(format!("reg E has {} qubits, format needs {m}", layout.reg_e)));
    }
    if (1usize << layout.reg_b) != eigs.len() + 1 {
        return Err(Error::InvalidInput("reg B width does not match the eigensystem".into()));
    }
    let encoded = eigs
        .lambdas
        .iter()
        .map(|&l| amplify_encode(l, fmt).map(|e| e.value()))
        .collect::<Result<Vec<_>>>()?;
    let modulus = 1u128 << m;
    let e_qubits: Vec<usize> = layout.e().collect();
    let mut gates: Vec<Gate> = e_qubits.iter().map(|&q| Gate::Hadamard(q)).collect();
    for (k, &control) in e_qubits.iter().enumerate() {
        let phases: Vec<f64> = match oracle {
            PhaseOracle::Encoded => encoded
                .iter()
                .map(|&e| {
                    let turns = ((e as u128) << k) % modulus;
                    2.0 * PI * turns as f64 / modulus as f64
                })
                .collect(),
            PhaseOracle::TrueOperator => eigs
                .lambdas
                .iter()
                .map(|&l| {
                    let turns = (l * (fmt.f as f64 + k as f64 - m as f64).exp2()).rem_euclid(1.0);
                    2.0 * PI * turns
                })
                .collect(),
        };
        gates.push(Gate::ControlledUnitary {
            controls: vec![control],
            targets: layout.b().collect(),
            matrix: Arc::new(evolution_power(eigs, &phases, layout.reg_b)),
            label: format!("U^{}", 1u64 << k),
        });
    }
    gates.extend(inverse_qft(&e_qubits));
    Ok(gates)
}

/// Reg E qubits of the distinguishing prefix, most significant first, paired
/// with the bit each must hold for eigenvalue row `j`.
fn prefix_controls(table: &AngleTable, j: usize, layout: &RegisterLayout) -> Vec<(usize, bool)> {
    let prefix = table.prefix(j);
    let top = layout.e().end;
    (0..table.prefix_len)
        .map(|idx| (top - 1 - idx as usize, prefix.bit(table.prefix_len - 1 - idx)))
        .collect()
}

fn zero_control_flips(controls: &[(usize, bool)]) -> Vec<Gate> {
    controls.iter().filter(|(_, bit)| !bit).map(|&(q, _)| Gate::PauliX(q)).collect()
}

/// Rotation with the angle bits materialized in reg A.
pub fn build_rotation_explicit(table: &AngleTable, layout: &RegisterLayout) -> Result<Vec<Gate>> {
    if layout.reg_a != table.kept_columns.len() {
        return Err(Error::InvalidInput(format!(
            "reg A has {} qubits, table keeps {} columns",
            layout.reg_a,
            table.kept_columns.len()
        )));
    }
    let a_qubits: Vec<usize> = layout.a().collect();
    let ancilla = layout.ancilla();
    let width = table.kept_columns.len() as u32;
    let mut gates = Vec::new();
    if width == 0 {
        return Ok(gates);
    }
    for j in 0..table.len() {
        let controls = prefix_controls(table, j, layout);
        let control_qubits: Vec<usize> = controls.iter().map(|(q, _)| *q).collect();
        let flips = zero_control_flips(&controls);
        let reduced = table.reduced_omegas[j];

        let mut load = flips.clone();
        for (idx, &a) in a_qubits.iter().enumerate() {
            if reduced.bit(width - 1 - idx as u32) {
                load.push(Gate::MultiControlledX { controls: control_qubits.clone(), target: a });
            }
        }
        load.extend(flips);

        gates.extend(load.iter().cloned());
        for (&a, &k) in a_qubits.iter().zip(&table.kept_columns) {
            gates.push(Gate::MultiControlledRy {
                controls: vec![a],
                target: ancilla,
                angle: PI / (1u64 << (k - 1)) as f64,
            });
        }
        gates.extend(invert_fragment(&load));
    }
    Ok(gates)
}

/// Rotation keyed directly on the reg E prefix: `Ry(2π·ω̂_j)` on the ancilla.
pub fn build_rotation_fused(table: &AngleTable, layout: &RegisterLayout) -> Result<Vec<Gate>> {
    if layout.reg_a != 0 {
        return Err(Error::InvalidInput("fused rotation expects an empty reg A".into()));
    }
    let ancilla = layout.ancilla();
    let mut gates = Vec::new();
    for j in 0..table.len() {
        let omega = table.quantized_omega(j);
        if omega == 0.0 {
            continue;
        }
        let controls = prefix_controls(table, j, layout);
        let flips = zero_control_flips(&controls);
        gates.extend(flips.iter().cloned());
        gates.push(Gate::MultiControlledRy {
            controls: controls.iter().map(|(q, _)| *q).collect(),
            target: ancilla,
            angle: 2.0 * PI * omega,
        });
        gates.extend(flips);
    }
    Ok(gates)
}

fn embedded_rhs(system: &PoissonSystem) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(system.normalized_b());
    v
}

/// Full solver: state preparation, phase estimation, rotation, uncomputation.
pub fn build_pipeline(system: &PoissonSystem, fmt: &FixedPointFormat, mode: RotationMode) -> Result<Circuit> {
    build_pipeline_with(system, fmt, &PipelineOptions::new(mode))
}

pub fn build_pipeline_with(system: &PoissonSystem, fmt: &FixedPointFormat, options: &PipelineOptions) -> Result<Circuit> {
    one_dimensional(system)?;
    let eigs = eigenpairs(system)?;
    let table = build_angle_table(&eigs, fmt)?;
    let reg_a = match options.mode {
        RotationMode::Explicit => table.kept_columns.len(),
        RotationMode::Fused => 0,
    };
    let layout = RegisterLayout::new(system.n() as usize, fmt.m() as usize, reg_a);
    if layout.total() > options.max_qubits {
        let hint = match options.mode {
            RotationMode::Explicit => "; fused mode drops reg A",
            RotationMode::Fused => "",
        };
        return Err(Error::Resource(format!(
            "{} mode needs {} qubits, budget is {}{hint}",
            options.mode,
            layout.total(),
            options.max_qubits
        )));
    }
    let mut metadata = CircuitMetadata::new("pipeline");
    metadata.mode = Some(options.mode);
    metadata.format = Some(*fmt);
    metadata.oracle = Some(options.oracle);
    let mut circuit = Circuit::new(layout, metadata);

    circuit.push(state_preparation(&embedded_rhs(system), &layout)?)?;
    let qpe = build_qpe_with(&eigs, fmt, &layout, options.oracle)?;
    circuit.extend(qpe.iter().cloned())?;
    let rotation = match options.mode {
        RotationMode::Explicit => build_rotation_explicit(&table, &layout)?,
        RotationMode::Fused => build_rotation_fused(&table, &layout)?,
    };
    circuit.extend(rotation)?;
    circuit.extend(invert_fragment(&qpe))?;
    Ok(circuit)
}

/// State preparation of `input` followed by phase estimation; reg E is the
/// register to read out.
pub fn build_phase_verification(system: &PoissonSystem, fmt: &FixedPointFormat, input: &[f64]) -> Result<Circuit> {
    build_phase_verification_with(system, fmt, input, PhaseOracle::Encoded)
}

pub fn build_phase_verification_with(
    system: &PoissonSystem,
    fmt: &FixedPointFormat,
    input: &[f64],
    oracle: PhaseOracle,
) -> Result<Circuit> {
    one_dimensional(system)?;
    if input.len() != system.cells() {
        return Err(Error::InvalidInput(format!(
            "input has {} amplitudes, expected {}",
            input.len(),
            system.cells()
        )));
    }
    if input[0] != 0.0 {
        return Err(Error::InvalidInput("basis state |0⟩ of reg B is unused and must be empty".into()));
    }
    let eigs = eigenpairs(system)?;
    let layout = RegisterLayout::new(system.n() as usize, fmt.m() as usize, 0);
    let mut metadata = CircuitMetadata::new("phase-verification");
    metadata.format = Some(*fmt);
    metadata.oracle = Some(oracle);
    let mut circuit = Circuit::new(layout, metadata);
    circuit.push(state_preparation(input, &layout)?)?;
    circuit.extend(build_qpe_with(&eigs, fmt, &layout, oracle)?)?;
    Ok(circuit)
}
