//! Eigenvalue amplification, rotation-angle encoding, zero-column pruning and
//! distinguishing prefixes for one problem.
//!
//!     cargo run --example fixed_point_encoding -- 2 4 10

use qpoisson::encoding::{build_angle_table, FixedPointFormat};
use qpoisson::model::{eigenpairs, PoissonSystem};

fn main() -> qpoisson::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, f, l) = match args[..] {
        [n, f, l, ..] => (n, f, l),
        _ => (2, 0, 10),
    };
    let system = PoissonSystem::one_dim(n, vec![1.0; (1 << n) - 1])?;
    let eigs = eigenpairs(&system)?;
    let fmt = FixedPointFormat::for_grid(n, f, l)?;
    let table = build_angle_table(&eigs, &fmt)?;

    println!("format i={} f={} l={} (m = {} eigenvalue bits)", fmt.i, fmt.f, fmt.l, fmt.m());
    println!("{:>10} {:>16} {:>10} {:>12} {:>18}", "lambda", "encoded", "lambda^", "omega", "angle bits");
    for j in 0..table.len() {
        println!(
            "{:>10.4} {:>16} {:>10.4} {:>12.8} {:>18}",
            eigs.lambdas[j],
            table.encoded_lambdas[j].to_string(),
            table.effective_lambdas[j],
            table.omegas[j],
            table.encoded_omegas[j].to_string()
        );
    }
    println!("kept angle columns: {:?}", table.kept_columns);
    println!("distinguishing prefix: {} bits", table.prefix_len);
    for j in 0..table.len() {
        println!("  {} -> {}", table.prefix(j), table.reduced_omegas[j]);
    }
    Ok(())
}
