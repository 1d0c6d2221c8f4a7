//! Readout-error model, calibration-matrix mitigation and the CNOT-count
//! fidelity estimate.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest register `calibration_matrix` will expand.
pub const MAX_CALIBRATION_WIDTH: usize = 10;

/// Fidelity below which a run is considered washed out by gate noise.
pub const WASHED_OUT_THRESHOLD: f64 = 1e-2;

/// Average two-qubit gate accuracy of the reference device.
pub const REFERENCE_CNOT_ACCURACY: f64 = 0.92;

/// Readout flip probabilities of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitReadout {
    /// Pr(read 1 | true 0).
    pub p01: f64,
    /// Pr(read 0 | true 1).
    pub p10: f64,
}

impl QubitReadout {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        for p in [p01, p10] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidInput(format!("readout error {p} outside [0, 0.5)")));
            }
        }
        Ok(Self { p01, p10 })
    }

    /// Column-stochastic confusion matrix, column = true bit, row = read bit.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }
}

/// Independent per-qubit readout errors. Qubit 0 is the rightmost character
/// of a measured bit string.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    qubits: Vec<QubitReadout>,
}

impl ReadoutModel {
    pub fn new(qubits: Vec<QubitReadout>) -> Self {
        Self { qubits }
    }

    pub fn uniform(width: usize, p01: f64, p10: f64) -> Result<Self> {
        Ok(Self { qubits: vec![QubitReadout::new(p01, p10)?; width] })
    }

    pub fn noiseless(width: usize) -> Self {
        Self { qubits: vec![QubitReadout { p01: 0.0, p10: 0.0 }; width] }
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitReadout] {
        &self.qubits
    }

    /// Parses `{"0": {"p01": .., "p10": ..}, "1": {..}}`; qubit keys must be
    /// exactly `0..width`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, QubitReadout> = serde_json::from_str(text)?;
        let mut indexed = BTreeMap::new();
        for (k, q) in raw {
            let idx: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("qubit key {k:?} is not an index")))?;
            indexed.insert(idx, QubitReadout::new(q.p01, q.p10)?);
        }
        if indexed.keys().copied().ne(0..indexed.len()) {
            return Err(Error::InvalidInput("readout model must list qubits 0..width".into()));
        }
        Ok(Self { qubits: indexed.into_values().collect() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl Serialize for ReadoutModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.qubits.len()))?;
        for (i, q) in self.qubits.iter().enumerate() {
            map.serialize_entry(&i.to_string(), q)?;
        }
        map.end()
    }
}

fn parse_outcome(bits: &str, width: usize) -> Result<usize> {
    if bits.len() != width || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidInput(format!("outcome {bits:?} is not a {width}-bit string")));
    }
    Ok(usize::from_str_radix(bits, 2).expect("validated"))
}

/// Flips each recorded bit independently according to `model`.
pub fn corrupt(histogram: &BTreeMap<String, u64>, model: &ReadoutModel, seed: u64) -> Result<BTreeMap<String, u64>> {
    let width = model.width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for (bits, &count) in histogram {
        let outcome = parse_outcome(bits, width)?;
        for _ in 0..count {
            let mut read = outcome;
            for (q, err) in model.qubits.iter().enumerate() {
                let p = if (outcome >> q) & 1 == 1 { err.p10 } else { err.p01 };
                if p > 0.0 && rng.gen::<f64>() < p {
                    read ^= 1 << q;
                }
            }
            *out.entry(format!("{read:0width$b}")).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// `M_{w−1} ⊗ … ⊗ M_0`: entry `(read, true)` is Pr(read | true).
pub fn calibration_matrix(model: &ReadoutModel, width: usize) -> Result<DMatrix<f64>> {
    if width > MAX_CALIBRATION_WIDTH {
        return Err(Error::Resource(format!(
            "calibration over {width} qubits exceeds the cap of {MAX_CALIBRATION_WIDTH}"
        )));
    }
    if width != model.width() {
        return Err(Error::InvalidInput(format!("model covers {} qubits, not {width}", model.width())));
    }
    let mut m = DMatrix::from_element(1, 1, 1.0);
    for q in model.qubits.iter().rev() {
        let c = q.confusion();
        let local = DMatrix::from_row_slice(2, 2, &[c[0][0], c[0][1], c[1][0], c[1][1]]);
        m = m.kronecker(&local);
    }
    Ok(m)
}

/// Normalized frequencies of a histogram, indexed by outcome.
pub fn histogram_distribution(histogram: &BTreeMap<String, u64>, width: usize) -> Result<Vec<f64>> {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return Err(Error::InvalidInput("empty histogram".into()));
    }
    let mut p = vec![0.0; 1 << width];
    for (bits, &count) in histogram {
        p[parse_outcome(bits, width)?] += count as f64 / total as f64;
    }
    Ok(p)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Least-squares inversion of the readout channel restricted to valid
/// distributions: minimizes `‖C x − y‖²` over `x ≥ 0, Σx = 1` by accelerated
/// projected gradient descent.
pub fn mitigate(histogram: &BTreeMap<String, u64>, calibration: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = calibration.nrows();
    if calibration.ncols() != dim || !dim.is_power_of_two() {
        return Err(Error::InvalidInput("calibration matrix must be square with 2^w rows".into()));
    }
    let width = dim.trailing_zeros() as usize;
    let y = nalgebra::DVector::from_vec(histogram_distribution(histogram, width)?);
    mitigate_distribution(&y, calibration)
}

fn mitigate_distribution(y: &nalgebra::DVector<f64>, c: &DMatrix<f64>) -> Result<Vec<f64>> {
    let ct = c.transpose();
    let gram = &ct * c;
    let cty = &ct * y;
    // Lipschitz constant of the gradient: ‖CᵀC‖₂ ≤ ‖CᵀC‖₁.
    let lipschitz = (0..gram.ncols())
        .map(|j| gram.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / lipschitz;

    let start = match c.clone().lu().solve(y) {
        Some(x) => project_simplex(x.as_slice()),
        None => y.iter().copied().collect(),
    };
    let mut x = nalgebra::DVector::from_vec(start);
    let mut z = x.clone();
    let mut t = 1.0_f64;
    for _ in 0..20_000 {
        let grad = &gram * &z - &cty;
        let next = nalgebra::DVector::from_vec(project_simplex((&z - grad * step).as_slice()));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = &next + (&next - &x) * ((t - 1.0) / t_next);
        let moved = (&next - &x).amax();
        x = next;
        t = t_next;
        if moved < 1e-14 {
            break;
        }
    }
    let total: f64 = x.iter().sum();
    Ok(x.iter().map(|v| v / total).collect())
}

/// `accuracy^cnot_count`.
pub fn fidelity_estimate(cnot_count: u64, gate_accuracy: f64) -> Result<f64> {
    if !(gate_accuracy > 0.0 && gate_accuracy <= 1.0) {
        return Err(Error::InvalidInput(format!("gate accuracy {gate_accuracy} outside (0, 1]")));
    }
    Ok(gate_accuracy.powf(cnot_count as f64))
}

/// `log10(accuracy^cnot_count)`, finite even where the estimate underflows.
pub fn fidelity_log10(cnot_count: u64, gate_accuracy: f64) -> Result<f64> {
    fidelity_estimate(0, gate_accuracy)?;
    Ok(cnot_count as f64 * gate_accuracy.log10())
}

pub fn is_washed_out(fidelity: f64) -> bool {
    fidelity < WASHED_OUT_THRESHOLD
}
