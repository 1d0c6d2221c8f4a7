//! Discretized 1D Poisson operator: matrix, closed-form spectrum and the
//! classical solution.
//!
//!     cargo run --example poisson_model -- 3

use qpoisson::model::{build_matrix, eigenpairs, exact_solve, PoissonSystem};

fn main() -> qpoisson::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let dim = (1usize << n) - 1;
    let system = PoissonSystem::one_dim(n, vec![1.0; dim])?;

    if dim <= 7 {
        println!("A =\n{}", build_matrix(&system)?);
    }
    let eigs = eigenpairs(&system)?;
    println!("h = {}, kappa = {:.3}", system.mesh_size(), eigs.kappa);
    for (j, l) in eigs.lambdas.iter().enumerate() {
        println!("  lambda_{} = {l:.6}   beta = {:+.6}", j + 1, eigs.betas[j]);
    }
    println!("normalized solution for uniform b: {:.5?}", exact_solve(&system)?);
    Ok(())
}
