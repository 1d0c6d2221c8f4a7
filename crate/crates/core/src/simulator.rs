//! Dense statevector simulation, post-selection and shot sampling.

use std::collections::BTreeMap;
use std::ops::Range;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, RegisterLayout};
use crate::error::{Error, Result};

/// Largest state `run_exact` allocates by default (2^28 amplitudes, 4 GiB).
pub const DEFAULT_MAX_SIM_QUBITS: usize = 28;

/// Name of the generator used for shot sampling, recorded in every result.
pub const RNG_ALGORITHM: &str = "ChaCha8";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl Statevector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes, num_qubits }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!("{len} amplitudes is not a power of two")));
        }
        Ok(Self { amplitudes, num_qubits: len.trailing_zeros() as usize })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Marginal distribution of the register occupying `qubits`.
    pub fn register_distribution(&self, qubits: Range<usize>) -> Vec<f64> {
        let width = qubits.len();
        let mut out = vec![0.0; 1 << width];
        let mask = (1usize << width) - 1;
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[(i >> qubits.start) & mask] += a.norm_sqr();
        }
        out
    }
}

fn control_mask(controls: &[usize]) -> usize {
    controls.iter().fold(0, |m, &q| m | (1 << q))
}

/// Applies a 2×2 matrix to `target` on every basis pair whose control bits are set.
fn apply_single(amps: &mut [Complex64], target: usize, mask: usize, m: [[Complex64; 2]; 2]) {
    let stride = 1usize << target;
    for base in (0..amps.len()).step_by(2 * stride) {
        for i in base..base + stride {
            if i & mask != mask {
                continue;
            }
            let (a0, a1) = (amps[i], amps[i + stride]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_x(amps: &mut [Complex64], target: usize, mask: usize) {
    let stride = 1usize << target;
    for base in (0..amps.len()).step_by(2 * stride) {
        for i in base..base + stride {
            if i & mask == mask {
                amps.swap(i, i + stride);
            }
        }
    }
}

fn ry_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    [[c, -s], [s, c]]
}

fn apply_dense(amps: &mut [Complex64], controls: &[usize], targets: &[usize], matrix: &nalgebra::DMatrix<Complex64>) {
    let dim = 1usize << targets.len();
    let cmask = control_mask(controls);
    let row_major: Vec<Complex64> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|(r, c)| matrix[(r, c)]).collect();
    let mut gathered = vec![ZERO; dim];

    let contiguous = targets.iter().enumerate().all(|(i, &t)| i == t);
    if contiguous {
        for (chunk_idx, chunk) in amps.chunks_exact_mut(dim).enumerate() {
            if (chunk_idx * dim) & cmask != cmask {
                continue;
            }
            gathered.copy_from_slice(chunk);
            for (r, out) in chunk.iter_mut().enumerate() {
                let row = &row_major[r * dim..(r + 1) * dim];
                *out = row.iter().zip(&gathered).map(|(m, a)| m * a).sum();
            }
        }
        return;
    }

    let offsets: Vec<usize> = (0..dim)
        .map(|r| targets.iter().enumerate().fold(0, |acc, (bit, &t)| acc | (((r >> bit) & 1) << t)))
        .collect();
    let tmask = control_mask(targets);
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cmask != cmask {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &row_major[r * dim..(r + 1) * dim];
            amps[base + off] = row.iter().zip(&gathered).map(|(m, a)| m * a).sum();
        }
    }
}

/// Applies one gate in place.
pub fn apply_gate(state: &mut Statevector, gate: &Gate) -> Result<()> {
    gate.validate(state.num_qubits)?;
    let amps = &mut state.amplitudes;
    match gate {
        Gate::Hadamard(q) => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_single(amps, *q, 0, [[h, h], [h, -h]]);
        }
        Gate::PauliX(q) => apply_x(amps, *q, 0),
        Gate::Ry { target, angle } => apply_single(amps, *target, 0, ry_matrix(*angle)),
        Gate::Phase { target, angle } => {
            let z = Complex64::from_polar(1.0, *angle);
            let bit = 1usize << target;
            amps.iter_mut().enumerate().filter(|(i, _)| i & bit != 0).for_each(|(_, a)| *a *= z);
        }
        Gate::ControlledPhase { control, target, angle } => {
            let z = Complex64::from_polar(1.0, *angle);
            let mask = (1usize << control) | (1usize << target);
            amps.iter_mut().enumerate().filter(|(i, _)| i & mask == mask).for_each(|(_, a)| *a *= z);
        }
        Gate::ControlledUnitary { controls, targets, matrix, .. } => apply_dense(amps, controls, targets, matrix),
        Gate::MultiControlledX { controls, target } => apply_x(amps, *target, control_mask(controls)),
        Gate::MultiControlledRy { controls, target, angle } => {
            apply_single(amps, *target, control_mask(controls), ry_matrix(*angle))
        }
        Gate::Swap(a, b) => {
            let (ba, bb) = (1usize << a, 1usize << b);
            for i in 0..amps.len() {
                if i & ba != 0 && i & bb == 0 {
                    amps.swap(i, i ^ ba ^ bb);
                }
            }
        }
    }
    Ok(())
}

/// Runs `circuit` from `|0…0⟩`.
pub fn run_exact(circuit: &Circuit) -> Result<Statevector> {
    run_exact_with_budget(circuit, DEFAULT_MAX_SIM_QUBITS)
}

pub fn run_exact_with_budget(circuit: &Circuit, max_qubits: usize) -> Result<Statevector> {
    let q = circuit.num_qubits();
    if q > max_qubits {
        return Err(Error::Resource(format!("{q} qubits exceed the simulator budget of {max_qubits}")));
    }
    let mut state = Statevector::zero(q);
    for gate in circuit.gates() {
        apply_gate(&mut state, gate)?;
    }
    Ok(state)
}

/// Exact readout of the ancilla-`|1⟩` branch.
#[derive(Debug, Clone, Serialize)]
pub struct Postselection {
    /// Reg B magnitudes over basis states `1..2^n − 1`, unit norm.
    pub solution: Vec<f64>,
    pub success_prob: f64,
    /// Probability mass of the success branch with reg E or reg A not `|0…0⟩`.
    pub leakage: f64,
}

pub fn postselect(state: &Statevector, layout: &RegisterLayout) -> Result<Postselection> {
    if state.num_qubits != layout.total() {
        return Err(Error::InvalidInput("state does not match the register layout".into()));
    }
    let n = layout.reg_b;
    let anc = 1usize << layout.ancilla();
    let b_mask = (1usize << n) - 1;
    let mut branch = vec![0.0; 1 << n];
    let mut success = 0.0;
    let mut leakage = 0.0;
    for (i, a) in state.amplitudes.iter().enumerate() {
        if i & anc == 0 {
            continue;
        }
        let p = a.norm_sqr();
        success += p;
        branch[i & b_mask] += p;
        if (i & !anc) >> n != 0 {
            leakage += p;
        }
    }
    if success < 1e-15 {
        return Err(Error::DegeneratePostselection(success));
    }
    let kept: f64 = branch[1..].iter().sum();
    let solution = branch[1..].iter().map(|p| (p / kept).sqrt()).collect();
    Ok(Postselection { solution, success_prob: success, leakage })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub solution: Vec<f64>,
    pub success_prob: f64,
    /// Counts keyed by `ancilla ‖ reg B` bit strings (sampling mode only).
    pub histogram: BTreeMap<String, u64>,
    pub shots: u64,
    pub kept: u64,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

/// Exact post-selected result, no sampling.
pub fn run_postselected(circuit: &Circuit) -> Result<RunResult> {
    let state = run_exact(circuit)?;
    let post = postselect(&state, &circuit.layout)?;
    Ok(RunResult {
        solution: post.solution,
        success_prob: post.success_prob,
        histogram: BTreeMap::new(),
        shots: 0,
        kept: 0,
        seed: None,
        rng: None,
    })
}

/// Draws `shots` samples of the register spanning `qubits` from `state`.
pub fn sample_register(state: &Statevector, qubits: Range<usize>, shots: u64, seed: u64) -> Result<Vec<u64>> {
    let probs = state.register_distribution(qubits);
    draw(&probs, shots, seed)
}

fn draw(probs: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidInput("at least one shot is required".into()));
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidInput(format!("bad distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}

/// Measures the ancilla and reg B `shots` times, keeps ancilla-`|1⟩` records
/// and estimates magnitudes as `√(v_i / Σ v_i)`.
pub fn sample(circuit: &Circuit, shots: u64, seed: u64) -> Result<RunResult> {
    let state = run_exact(circuit)?;
    sample_state(&state, &circuit.layout, shots, seed)
}

pub fn sample_state(state: &Statevector, layout: &RegisterLayout, shots: u64, seed: u64) -> Result<RunResult> {
    let n = layout.reg_b;
    let anc_bit = layout.ancilla();
    let b_mask = (1usize << n) - 1;
    let mut probs = vec![0.0; 2 << n];
    for (i, a) in state.amplitudes.iter().enumerate() {
        let outcome = (((i >> anc_bit) & 1) << n) | (i & b_mask);
        probs[outcome] += a.norm_sqr();
    }
    let counts = draw(&probs, shots, seed)?;
    let kept_counts = &counts[1 << n..];
    let kept: u64 = kept_counts.iter().sum();
    if kept == 0 {
        return Err(Error::EmptyResult(shots));
    }
    let histogram = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(outcome, &c)| (format!("{outcome:0width$b}", width = n + 1), c))
        .collect();
    let interior: u64 = kept_counts[1..].iter().sum();
    let solution = kept_counts[1..].iter().map(|&v| (v as f64 / interior as f64).sqrt()).collect();
    Ok(RunResult {
        solution,
        success_prob: kept as f64 / shots as f64,
        histogram,
        shots,
        kept,
        seed: Some(seed),
        rng: Some(RNG_ALGORITHM.to_string()),
    })
}

impl RunResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Histogram as `bitstring,count` CSV.
    pub fn histogram_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bitstring", "count"])?;
        for (k, v) in &self.histogram {
            w.write_record([k.as_str(), &v.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
