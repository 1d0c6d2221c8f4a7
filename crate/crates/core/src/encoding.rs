//! Fixed-point machinery for the eigenvalue and rotation-angle registers.
//!
//! Eigenvalues are amplified by `2^f` and truncated into an `m = i + f` bit
//! unsigned integer. Rotation coefficients `ω = arccot(√(λ² − 1))/π` are
//! computed from the value the register actually holds and rounded to `l`
//! fractional bits. Columns of the `ω` table that are zero for every
//! eigenvalue are pruned, and the rotation is keyed on the shortest
//! most-significant prefix of the eigenvalue encodings that tells them apart.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::EigenData;

/// Fixed-width unsigned bit pattern, displayed most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    width: u32,
}

impl BitString {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width > 63 {
            return Err(Error::InvalidInput(format!("bit width {width} exceeds 63")));
        }
        if value >> width != 0 {
            return Err(Error::InvalidInput(format!("{value} does not fit in {width} bits")));
        }
        Ok(Self { value, width })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Bit at `index` counted from the least significant bit.
    pub fn bit(&self, index: u32) -> bool {
        (self.value >> index) & 1 == 1
    }

    /// The `len` most significant bits, as a `len`-bit string.
    pub fn prefix(&self, len: u32) -> BitString {
        let len = len.min(self.width);
        BitString { value: self.value >> (self.width - len), width: len }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bits: String = text.chars().filter(|c| *c != '_').collect();
        if bits.is_empty() {
            return Ok(Self { value: 0, width: 0 });
        }
        if bits.len() > 63 || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidInput(format!("not a bit string: {text:?}")));
        }
        let value = u64::from_str_radix(&bits, 2).expect("validated binary digits");
        Ok(Self { value, width: bits.len() as u32 })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (0..self.width).rev() {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Bit widths of the eigenvalue register (`i` integer + `f` fractional bits)
/// and of the unpruned angle register (`l` bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointFormat {
    pub i: u32,
    pub f: u32,
    pub l: u32,
}

impl FixedPointFormat {
    pub fn new(i: u32, f: u32, l: u32) -> Result<Self> {
        let fmt = Self { i, f, l };
        fmt.validate()?;
        Ok(fmt)
    }

    /// The conventional `i = 2n + 2` integer width.
    pub fn for_grid(n: u32, f: u32, l: u32) -> Result<Self> {
        Self::new(2 * n + 2, f, l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.i == 0 {
            return Err(Error::InvalidInput("integer width i must be positive".into()));
        }
        if self.l == 0 || self.l > 52 {
            return Err(Error::InvalidInput(format!("angle width l must be in 1..=52, got {}", self.l)));
        }
        if self.m() > 40 {
            return Err(Error::InvalidInput(format!("eigenvalue register width {} exceeds 40", self.m())));
        }
        Ok(())
    }

    /// Total eigenvalue register width `m = i + f`.
    pub fn m(&self) -> u32 {
        self.i + self.f
    }
}

/// `floor(λ·2^f)` as an `m`-bit string.
pub fn amplify_encode(lambda: f64, fmt: &FixedPointFormat) -> Result<BitString> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("eigenvalue must be positive, got {lambda}")));
    }
    // Scaling by a power of two is exact. Closed-form eigenvalues that are
    // mathematically integral (e.g. 32 for N = 4) can land one ulp low, so
    // values within a few ulps of an integer snap to it before truncating.
    let raw = lambda * (fmt.f as f64).exp2();
    let nearest = raw.round();
    let scaled = if (raw - nearest).abs() <= 1e-12 * raw.max(1.0) { nearest } else { raw.floor() };
    if scaled >= (fmt.m() as f64).exp2() {
        return Err(Error::Overflow { lambda, f: fmt.f, width: fmt.m() });
    }
    BitString::new(scaled as u64, fmt.m())
}

/// The eigenvalue an encoded register state stands for: `value · 2^{−f}`.
pub fn effective_lambda(encoded: &BitString, fmt: &FixedPointFormat) -> f64 {
    encoded.value() as f64 * (-(fmt.f as f64)).exp2()
}

/// `ω = arccot(√(λ² − 1))/π`, so that `sin(ωπ) = 1/λ`.
pub fn angle_coefficient(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::Domain(format!("rotation needs λ ≥ 1, got {lambda}")));
    }
    let cot = ((lambda - 1.0) * (lambda + 1.0)).sqrt();
    Ok(1.0_f64.atan2(cot) / PI)
}

/// `round(ω·2^l)` (ties up, clamped to `2^l − 1`) as an `l`-bit fraction.
pub fn encode_angle(omega: f64, l: u32) -> Result<BitString> {
    if !(0.0..1.0).contains(&omega) {
        return Err(Error::Domain(format!("angle coefficient must be in [0, 1), got {omega}")));
    }
    let top = (1u64 << l) - 1;
    let scaled = (omega * (l as f64).exp2() + 0.5).floor() as u64;
    BitString::new(scaled.min(top), l)
}

/// `value / 2^l` for an `l`-bit fraction.
pub fn decode_angle(encoded: &BitString) -> f64 {
    encoded.value() as f64 * (-(encoded.width() as f64)).exp2()
}

/// Drops the fraction positions (1-indexed from the binary point) that are zero
/// in every string. Returns the kept positions and the reduced strings.
pub fn prune_zero_columns(encoded: &[BitString]) -> Result<(Vec<u32>, Vec<BitString>)> {
    let Some(first) = encoded.first() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let l = first.width();
    if encoded.iter().any(|s| s.width() != l) {
        return Err(Error::InvalidInput("angle strings must share one width".into()));
    }
    let any_set = encoded.iter().fold(0u64, |acc, s| acc | s.value());
    let kept: Vec<u32> = (1..=l).filter(|k| (any_set >> (l - k)) & 1 == 1).collect();
    let width = kept.len() as u32;
    let reduced = encoded
        .iter()
        .map(|s| {
            let value = kept
                .iter()
                .fold(0u64, |acc, &k| (acc << 1) | ((s.value() >> (l - k)) & 1));
            BitString { value, width }
        })
        .collect();
    Ok((kept, reduced))
}

/// Inverse of [`prune_zero_columns`]: places the reduced bits back at the kept
/// positions of an `l`-bit fraction.
pub fn restore_columns(reduced: &BitString, kept: &[u32], l: u32) -> BitString {
    let value = kept.iter().enumerate().fold(0u64, |acc, (idx, &k)| {
        let bit = (reduced.value() >> (kept.len() - 1 - idx)) & 1;
        acc | (bit << (l - k))
    });
    BitString { value, width: l }
}

/// Smallest `p` such that the `p`-bit most-significant prefixes are pairwise
/// distinct.
pub fn distinguishing_prefix(encoded: &[BitString]) -> Result<u32> {
    if encoded.len() <= 1 {
        return Ok(0);
    }
    let width = encoded[0].width();
    let mut seen = HashSet::with_capacity(encoded.len());
    for s in encoded {
        if !seen.insert(*s) {
            return Err(Error::Collision(format!("{s} appears more than once")));
        }
    }
    for p in 1..=width {
        let mut prefixes = HashSet::with_capacity(encoded.len());
        if encoded.iter().all(|s| prefixes.insert(s.prefix(p))) {
            return Ok(p);
        }
    }
    unreachable!("full-width strings are distinct")
}

/// Everything the controlled-rotation builders need, per eigenvalue `j`.
#[derive(Debug, Clone, Serialize)]
pub struct AngleTable {
    pub format: FixedPointFormat,
    pub encoded_lambdas: Vec<BitString>,
    pub effective_lambdas: Vec<f64>,
    /// Unquantized coefficients computed from the effective eigenvalues.
    pub omegas: Vec<f64>,
    /// `l`-bit fractions, before pruning.
    pub encoded_omegas: Vec<BitString>,
    /// Retained fraction positions, 1-indexed from the binary point.
    pub kept_columns: Vec<u32>,
    /// Encoded angles restricted to `kept_columns`.
    pub reduced_omegas: Vec<BitString>,
    pub prefix_len: u32,
}

impl AngleTable {
    pub fn len(&self) -> usize {
        self.encoded_lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.encoded_lambdas.is_empty()
    }

    /// The angle coefficient the circuit actually applies for row `j` (0-based).
    pub fn quantized_omega(&self, j: usize) -> f64 {
        decode_angle(&self.encoded_omegas[j])
    }

    /// Distinguishing prefix of row `j` (0-based).
    pub fn prefix(&self, j: usize) -> BitString {
        self.encoded_lambdas[j].prefix(self.prefix_len)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Encodes every eigenvalue and derives its rotation coefficient.
pub fn build_angle_table(eigs: &EigenData, fmt: &FixedPointFormat) -> Result<AngleTable> {
    build_angle_table_from_lambdas(&eigs.lambdas, fmt)
}

pub fn build_angle_table_from_lambdas(lambdas: &[f64], fmt: &FixedPointFormat) -> Result<AngleTable> {
    fmt.validate()?;
    let encoded_lambdas = lambdas
        .iter()
        .map(|&l| amplify_encode(l, fmt))
        .collect::<Result<Vec<_>>>()?;
    let effective_lambdas: Vec<f64> = encoded_lambdas.iter().map(|e| effective_lambda(e, fmt)).collect();
    let omegas = effective_lambdas
        .iter()
        .map(|&l| angle_coefficient(l))
        .collect::<Result<Vec<_>>>()?;
    let encoded_omegas = omegas
        .iter()
        .map(|&w| encode_angle(w, fmt.l))
        .collect::<Result<Vec<_>>>()?;
    let (kept_columns, reduced_omegas) = prune_zero_columns(&encoded_omegas)?;
    let prefix_len = distinguishing_prefix(&encoded_lambdas)?;
    Ok(AngleTable {
        format: *fmt,
        encoded_lambdas,
        effective_lambdas,
        omegas,
        encoded_omegas,
        kept_columns,
        reduced_omegas,
        prefix_len,
    })
}
