//! Classical model of the discretized 1D (and Kronecker-sum d-D) Poisson problem.
//!
//! The matrix is `(1/h²)·tridiag(−1, 2, −1)` on the interior points of a uniform
//! grid with `N = 2^n` cells and homogeneous Dirichlet boundaries. Its spectrum is
//! known in closed form, which both the circuit builders and the tests rely on.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest matrix side length `build_matrix` will materialize by default.
pub const DEFAULT_MATRIX_BUDGET: usize = 4096;

/// A discretized Poisson problem `A v = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemDocument", into = "ProblemDocument")]
pub struct PoissonSystem {
    n: u32,
    d: u32,
    b: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProblemDocument {
    n: u32,
    #[serde(default = "one")]
    d: u32,
    b: Vec<f64>,
}

fn one() -> u32 {
    1
}

impl TryFrom<ProblemDocument> for PoissonSystem {
    type Error = Error;

    fn try_from(doc: ProblemDocument) -> Result<Self> {
        PoissonSystem::new(doc.n, doc.d, doc.b)
    }
}

impl From<PoissonSystem> for ProblemDocument {
    fn from(s: PoissonSystem) -> Self {
        ProblemDocument { n: s.n, d: s.d, b: s.b }
    }
}

impl PoissonSystem {
    /// Builds a system on `2^n` cells per axis in `d` dimensions.
    ///
    /// `b` holds the interior right-hand side values `b_1..b_{N-1}` (row-major
    /// over the `d` axes when `d > 1`).
    pub fn new(n: u32, d: u32, b: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::InvalidInput(format!("grid exponent n must be in 1..=30, got {n}")));
        }
        if d == 0 {
            return Err(Error::InvalidInput("spatial dimension d must be at least 1".into()));
        }
        let dim = (1usize << n) - 1;
        let expected = dim
            .checked_pow(d)
            .ok_or_else(|| Error::Resource(format!("(2^{n} - 1)^{d} unknowns overflow")))?;
        if b.len() != expected {
            return Err(Error::InvalidInput(format!(
                "right-hand side has {} entries, expected {expected}",
                b.len()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("right-hand side contains non-finite values".into()));
        }
        if b.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("right-hand side must have a nonzero entry".into()));
        }
        Ok(Self { n, d, b })
    }

    /// One-dimensional system.
    pub fn one_dim(n: u32, b: Vec<f64>) -> Result<Self> {
        Self::new(n, 1, b)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Number of cells per axis, `N = 2^n`.
    pub fn cells(&self) -> usize {
        1 << self.n
    }

    /// Interior unknowns per axis, `N − 1`.
    pub fn dim(&self) -> usize {
        self.cells() - 1
    }

    /// Total number of unknowns, `(N − 1)^d`.
    pub fn unknowns(&self) -> usize {
        self.dim().pow(self.d)
    }

    pub fn mesh_size(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    /// `b / ‖b‖`.
    pub fn normalized_b(&self) -> Vec<f64> {
        normalized(&self.b)
    }
}

/// Closed-form spectral data of the 1D operator.
#[derive(Debug, Clone)]
pub struct EigenData {
    /// `λ_j = 4N² sin²(jπ/2N)`, ascending in `j = 1..N−1`.
    pub lambdas: Vec<f64>,
    /// Column `j−1` holds `u_j(k) = √(2/N) sin(jπk/N)`.
    pub eigvecs: DMatrix<f64>,
    /// `β_j = ⟨u_j, b/‖b‖⟩`.
    pub betas: Vec<f64>,
    pub kappa: f64,
}

impl EigenData {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Eigenvector `u_j` for the 1-based index `j`.
    pub fn eigvec(&self, j: usize) -> Vec<f64> {
        self.eigvecs.column(j - 1).iter().copied().collect()
    }
}

/// 1D operator `(1/h²)·tridiag(−1, 2, −1)` of side `2^n − 1`.
fn tridiagonal(n: u32) -> DMatrix<f64> {
    let cells = 1usize << n;
    let dim = cells - 1;
    let scale = (cells * cells) as f64;
    DMatrix::from_fn(dim, dim, |r, c| match r.abs_diff(c) {
        0 => 2.0 * scale,
        1 => -scale,
        _ => 0.0,
    })
}

/// Dense system matrix. For `d > 1` this is the Kronecker sum of `d` copies of
/// the 1D operator.
pub fn build_matrix(system: &PoissonSystem) -> Result<DMatrix<f64>> {
    build_matrix_with_budget(system, DEFAULT_MATRIX_BUDGET)
}

pub fn build_matrix_with_budget(system: &PoissonSystem, max_side: usize) -> Result<DMatrix<f64>> {
    let side = system.unknowns();
    if side > max_side {
        return Err(Error::Resource(format!(
            "matrix side {side} exceeds the budget of {max_side}"
        )));
    }
    let a = tridiagonal(system.n);
    if system.d == 1 {
        return Ok(a);
    }
    let dim = system.dim();
    let mut out = DMatrix::zeros(side, side);
    for axis in 0..system.d {
        // I^{⊗axis} ⊗ A ⊗ I^{⊗(d−axis−1)}
        let left = DMatrix::<f64>::identity(dim.pow(axis), dim.pow(axis));
        let right = DMatrix::<f64>::identity(dim.pow(system.d - axis - 1), dim.pow(system.d - axis - 1));
        out += left.kronecker(&a).kronecker(&right);
    }
    Ok(out)
}

/// Closed-form eigenpairs and input coefficients of a 1D system.
pub fn eigenpairs(system: &PoissonSystem) -> Result<EigenData> {
    if system.d != 1 {
        return Err(Error::Unsupported(format!(
            "closed-form eigenpairs are per axis; got d = {}",
            system.d
        )));
    }
    let cells = system.cells();
    let nf = cells as f64;
    let dim = system.dim();
    let lambdas: Vec<f64> = (1..=dim)
        .map(|j| {
            let s = (j as f64 * PI / (2.0 * nf)).sin();
            4.0 * nf * nf * s * s
        })
        .collect();
    let norm = (2.0 / nf).sqrt();
    let eigvecs = DMatrix::from_fn(dim, dim, |k, j| {
        norm * (((j + 1) * (k + 1)) as f64 * PI / nf).sin()
    });
    let b = system.normalized_b();
    let betas = (0..dim)
        .map(|j| eigvecs.column(j).iter().zip(&b).map(|(u, v)| u * v).sum())
        .collect();
    let kappa = lambdas[dim - 1] / lambdas[0];
    Ok(EigenData { lambdas, eigvecs, betas, kappa })
}

/// `A⁻¹b` normalized to unit length.
///
/// One-dimensional systems use tridiagonal (Thomas) elimination; the
/// multi-dimensional classical model falls back to a dense Cholesky solve.
pub fn exact_solve(system: &PoissonSystem) -> Result<Vec<f64>> {
    let raw = unnormalized_solve(system)?;
    Ok(normalized(&raw))
}

/// `A⁻¹b` without normalization.
pub fn unnormalized_solve(system: &PoissonSystem) -> Result<Vec<f64>> {
    if system.d == 1 {
        let scale = (system.cells() * system.cells()) as f64;
        let dim = system.dim();
        return Ok(thomas(&vec![-scale; dim], &vec![2.0 * scale; dim], &vec![-scale; dim], &system.b));
    }
    let a = build_matrix(system)?;
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Domain("system matrix is not positive definite".into()))?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(&system.b));
    Ok(x.iter().copied().collect())
}

/// Tridiagonal solve with sub-diagonal `lower` (first entry ignored), diagonal
/// `diag` and super-diagonal `upper` (last entry ignored).
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

pub(crate) fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}
