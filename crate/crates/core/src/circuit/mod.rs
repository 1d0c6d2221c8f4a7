//! Gate-level circuit representation.
//!
//! Qubits are numbered little-endian: qubit 0 is the least significant bit of
//! a basis-state index. Registers are laid out contiguously as
//! `reg B | reg E | reg A | ancilla`, each read as an unsigned integer whose
//! least significant bit is its lowest qubit.

mod builders;

use std::fmt::{self, Write as _};
use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::FixedPointFormat;
use crate::error::{Error, Result};

pub use builders::{
    build_phase_verification, build_phase_verification_with, build_pipeline, build_pipeline_with, build_qpe, build_qpe_with,
    build_rotation_explicit, build_rotation_fused, inverse_qft, qft, state_preparation, PipelineOptions,
    DEFAULT_MAX_QUBITS,
};

pub type CMatrix = DMatrix<Complex64>;

/// Register widths of the solver circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub reg_b: usize,
    pub reg_e: usize,
    pub reg_a: usize,
}

impl RegisterLayout {
    pub fn new(reg_b: usize, reg_e: usize, reg_a: usize) -> Self {
        Self { reg_b, reg_e, reg_a }
    }

    pub fn b(&self) -> Range<usize> {
        0..self.reg_b
    }

    pub fn e(&self) -> Range<usize> {
        self.reg_b..self.reg_b + self.reg_e
    }

    pub fn a(&self) -> Range<usize> {
        let start = self.reg_b + self.reg_e;
        start..start + self.reg_a
    }

    pub fn ancilla(&self) -> usize {
        self.reg_b + self.reg_e + self.reg_a
    }

    pub fn total(&self) -> usize {
        self.reg_b + self.reg_e + self.reg_a + 1
    }
}

/// How the eigenvalue-inversion rotation is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    /// Angle bits are loaded into reg A and drive per-bit controlled rotations.
    Explicit,
    /// Reg A is elided; each eigenvalue prefix rotates the ancilla directly.
    Fused,
}

impl fmt::Display for RotationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationMode::Explicit => "explicit",
            RotationMode::Fused => "fused",
        })
    }
}

/// Which unitary drives phase estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseOracle {
    /// Eigenphases are the truncated register values `E_j / 2^m`, so phase
    /// estimation is exact.
    #[default]
    Encoded,
    /// Eigenphases are `λ_j·2^f / 2^m` for the true eigenvalues; the readout
    /// leaks onto neighbouring register values.
    TrueOperator,
}

#[derive(Debug, Clone)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    Ry { target: usize, angle: f64 },
    Phase { target: usize, angle: f64 },
    ControlledPhase { control: usize, target: usize, angle: f64 },
    /// Dense unitary over `targets` (first target is the least significant
    /// bit of the matrix index), applied when every control is `|1⟩`.
    ControlledUnitary { controls: Vec<usize>, targets: Vec<usize>, matrix: Arc<CMatrix>, label: String },
    MultiControlledX { controls: Vec<usize>, target: usize },
    MultiControlledRy { controls: Vec<usize>, target: usize, angle: f64 },
    Swap(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Hadamard(_) => "H",
            Gate::PauliX(_) => "X",
            Gate::Ry { .. } => "RY",
            Gate::Phase { .. } => "P",
            Gate::ControlledPhase { .. } => "CP",
            Gate::ControlledUnitary { .. } => "CU",
            Gate::MultiControlledX { .. } => "MCX",
            Gate::MultiControlledRy { .. } => "MCRY",
            Gate::Swap(..) => "SWAP",
        }
    }

    pub fn controls(&self) -> &[usize] {
        match self {
            Gate::ControlledPhase { control, .. } => std::slice::from_ref(control),
            Gate::ControlledUnitary { controls, .. }
            | Gate::MultiControlledX { controls, .. }
            | Gate::MultiControlledRy { controls, .. } => controls,
            _ => &[],
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) | Gate::PauliX(q) => vec![*q],
            Gate::Ry { target, .. }
            | Gate::Phase { target, .. }
            | Gate::ControlledPhase { target, .. }
            | Gate::MultiControlledX { target, .. }
            | Gate::MultiControlledRy { target, .. } => vec![*target],
            Gate::ControlledUnitary { targets, .. } => targets.clone(),
            Gate::Swap(a, b) => vec![*a, *b],
        }
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.controls().to_vec();
        q.extend(self.targets());
        q
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Ry { target, angle } => Gate::Ry { target: *target, angle: -angle },
            Gate::Phase { target, angle } => Gate::Phase { target: *target, angle: -angle },
            Gate::ControlledPhase { control, target, angle } => {
                Gate::ControlledPhase { control: *control, target: *target, angle: -angle }
            }
            Gate::ControlledUnitary { controls, targets, matrix, label } => Gate::ControlledUnitary {
                controls: controls.clone(),
                targets: targets.clone(),
                matrix: Arc::new(matrix.adjoint()),
                label: match label.strip_suffix('†') {
                    Some(base) => base.to_string(),
                    None => format!("{label}†"),
                },
            },
            Gate::MultiControlledRy { controls, target, angle } => {
                Gate::MultiControlledRy { controls: controls.clone(), target: *target, angle: -angle }
            }
            g => g.clone(),
        }
    }

    /// Checks qubit bounds, disjointness and (for dense gates) unitarity.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (idx, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::InvalidInput(format!("{} touches qubit {q} of {num_qubits}", self.kind())));
            }
            if qubits[..idx].contains(&q) {
                return Err(Error::InvalidInput(format!("{} uses qubit {q} twice", self.kind())));
            }
        }
        if let Gate::ControlledUnitary { targets, matrix, label, .. } = self {
            let dim = 1usize << targets.len();
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(Error::InvalidInput(format!(
                    "{label}: {}x{} matrix on {} targets",
                    matrix.nrows(),
                    matrix.ncols(),
                    targets.len()
                )));
            }
            let defect = (matrix.adjoint() * matrix.as_ref() - CMatrix::identity(dim, dim))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > 1e-10 {
                return Err(Error::InvalidInput(format!("{label} is not unitary (defect {defect:e})")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{} q[", self.kind())?;
        if self.controls().is_empty() || matches!(self, Gate::ControlledPhase { .. }) {
            f.write_str(&join(&self.qubits()))?;
        } else {
            write!(f, "{}|{}", join(self.controls()), join(&self.targets()))?;
        }
        f.write_str("]")?;
        match self {
            Gate::Ry { angle, .. }
            | Gate::Phase { angle, .. }
            | Gate::ControlledPhase { angle, .. }
            | Gate::MultiControlledRy { angle, .. } => write!(f, " ({angle:.12})"),
            Gate::ControlledUnitary { label, matrix, .. } => write!(f, " ({label}, dim={})", matrix.nrows()),
            _ => Ok(()),
        }
    }
}

/// Where a circuit came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitMetadata {
    pub purpose: String,
    pub mode: Option<RotationMode>,
    pub format: Option<FixedPointFormat>,
    pub oracle: Option<PhaseOracle>,
}

impl CircuitMetadata {
    pub fn new(purpose: &str) -> Self {
        Self { purpose: purpose.to_string(), mode: None, format: None, oracle: None }
    }
}

#[derive(Debug, Clone)]
pub struct Circuit {
    pub layout: RegisterLayout,
    gates: Vec<Gate>,
    pub metadata: CircuitMetadata,
}

impl Circuit {
    pub fn new(layout: RegisterLayout, metadata: CircuitMetadata) -> Self {
        Self { layout, gates: Vec::new(), metadata }
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// The adjoint circuit: gates reversed and individually inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            layout: self.layout,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            metadata: self.metadata.clone(),
        }
    }

    /// Line-oriented text form: a `#` header followed by one gate per line.
    pub fn dump(&self) -> String {
        let l = &self.layout;
        let mut out = format!(
            "# qubits={} reg_b={} reg_e={} reg_a={} ancilla={}\n",
            l.total(),
            l.reg_b,
            l.reg_e,
            l.reg_a,
            l.ancilla()
        );
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

/// Gates of a fragment, inverted and in reverse order.
pub fn invert_fragment(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}
