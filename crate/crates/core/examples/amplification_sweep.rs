//! Relative error and success probability as the amplification exponent f
//! grows, printed as CSV.
//!
//!     cargo run --release --example amplification_sweep -- table1-7x7

use qpoisson::analytics::sweep_csv;
use qpoisson::cli::{sweep, ExperimentConfig, ModeChoice};

fn main() -> qpoisson::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "table1-7x7".into());
    let cfg = ExperimentConfig { l: 16, mode: ModeChoice::Fused, ..ExperimentConfig::with_preset(&name) };
    let rows = sweep(&cfg, &[0, 2, 4, 6, 8])?;
    print!("{}", sweep_csv(&rows)?);
    Ok(())
}
