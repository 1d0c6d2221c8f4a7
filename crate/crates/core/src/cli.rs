//! Config-driven experiment runner behind the `qpoisson` binary.
//!
//! Every command takes an [`ExperimentConfig`] (from `--config file.json`,
//! overridden by flags) and returns its output as a string; the resolved
//! config is embedded in the output so runs can be reproduced.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    analytic_success_probability, expected_success_probability, relative_error, resource_report, sweep_csv,
    ResourceReport, SweepRow,
};
use crate::circuit::{build_phase_verification_with, build_pipeline_with, PhaseOracle, PipelineOptions, RotationMode};
use crate::encoding::{build_angle_table, AngleTable, BitString, FixedPointFormat};
use crate::error::{Error, Result};
use crate::model::{eigenpairs, exact_solve, EigenData, PoissonSystem};
use crate::noise::{calibration_matrix, corrupt, histogram_distribution, mitigate, ReadoutModel};
use crate::simulator::{postselect, run_exact, sample_register, sample_state, RunResult, RNG_ALGORITHM};

/// `mode = auto` picks explicit rotation up to this many qubits.
pub const AUTO_EXPLICIT_MAX_QUBITS: usize = 24;

pub const DEFAULT_SHOTS: u64 = 1_000_000;

pub const PRESETS: [&str; 3] = ["table1-3x3", "table1-7x7", "table1-15x15"];

/// Right-hand side of a named preset.
pub fn preset(name: &str) -> Result<PoissonSystem> {
    let b = match name {
        "table1-3x3" => vec![std::f64::consts::FRAC_1_SQRT_2, 0.5, 0.5],
        "table1-7x7" => [vec![0.25; 4], vec![0.5; 3]].concat(),
        "table1-15x15" => [vec![0.25; 12], vec![0.5, 0.0, 0.0]].concat(),
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    let n = (b.len() + 1).trailing_zeros();
    PoissonSystem::one_dim(n, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Explicit,
    Fused,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    #[default]
    Encoded,
    TrueOperator,
}

impl From<OracleChoice> for PhaseOracle {
    fn from(o: OracleChoice) -> Self {
        match o {
            OracleChoice::Encoded => PhaseOracle::Encoded,
            OracleChoice::TrueOperator => PhaseOracle::TrueOperator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Named benchmark input (see [`PRESETS`]); mutually exclusive with `n`/`b`.
    pub preset: Option<String>,
    pub n: Option<u32>,
    pub d: u32,
    pub b: Option<Vec<f64>>,
    /// Integer bits of the eigenvalue register; defaults to `2n + 2`.
    pub i: Option<u32>,
    pub f: u32,
    pub l: u32,
    pub mode: ModeChoice,
    pub oracle: OracleChoice,
    pub backend: Backend,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: None,
            n: None,
            d: 1,
            b: None,
            i: None,
            f: 0,
            l: 16,
            mode: ModeChoice::Auto,
            oracle: OracleChoice::Encoded,
            backend: Backend::Exact,
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise: None,
            output: None,
            format: OutputFormat::Json,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn with_preset(name: &str) -> Self {
        Self { preset: Some(name.to_string()), ..Self::default() }
    }

    pub fn system(&self) -> Result<PoissonSystem> {
        match (&self.preset, self.n, &self.b) {
            (Some(name), None, None) => preset(name),
            (Some(_), _, _) => Err(Error::InvalidInput("give either a preset or n/b, not both".into())),
            (None, Some(n), Some(b)) => PoissonSystem::new(n, self.d, b.clone()),
            (None, None, Some(b)) if self.d == 1 => {
                let cells = b.len() + 1;
                if !cells.is_power_of_two() {
                    return Err(Error::InvalidInput(format!("b has {} entries; expected 2^n − 1", b.len())));
                }
                PoissonSystem::one_dim(cells.trailing_zeros(), b.clone())
            }
            _ => Err(Error::InvalidInput("no problem given: use a preset or b (and n)".into())),
        }
    }

    pub fn format(&self, system: &PoissonSystem) -> Result<FixedPointFormat> {
        match self.i {
            Some(i) => FixedPointFormat::new(i, self.f, self.l),
            None => FixedPointFormat::for_grid(system.n(), self.f, self.l),
        }
    }

    /// The config with defaults filled in, as embedded in outputs.
    pub fn resolved(&self, system: &PoissonSystem) -> Self {
        let mut c = self.clone();
        c.i = Some(c.i.unwrap_or(2 * system.n() + 2));
        c
    }

    fn summary_line(&self) -> Result<String> {
        Ok(format!("# config={}\n", serde_json::to_string(self)?))
    }
}

/// Everything derived from a config before any circuit is simulated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub system: PoissonSystem,
    pub format: FixedPointFormat,
    pub eigs: EigenData,
    pub table: AngleTable,
    pub mode: RotationMode,
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let system = config.system()?;
    let format = config.format(&system)?;
    let eigs = eigenpairs(&system)?;
    let table = build_angle_table(&eigs, &format)?;
    let mode = resolve_mode(config.mode, &system, &format, &table);
    Ok(Prepared { config: config.resolved(&system), system, format, eigs, table, mode })
}

/// Explicit when its full register layout fits [`AUTO_EXPLICIT_MAX_QUBITS`].
pub fn resolve_mode(choice: ModeChoice, system: &PoissonSystem, format: &FixedPointFormat, table: &AngleTable) -> RotationMode {
    match choice {
        ModeChoice::Explicit => RotationMode::Explicit,
        ModeChoice::Fused => RotationMode::Fused,
        ModeChoice::Auto => {
            let explicit = system.n() as usize + format.m() as usize + table.kept_columns.len() + 1;
            if explicit <= AUTO_EXPLICIT_MAX_QUBITS {
                RotationMode::Explicit
            } else {
                RotationMode::Fused
            }
        }
    }
}

fn options(p: &Prepared) -> PipelineOptions {
    PipelineOptions { oracle: p.config.oracle.into(), ..PipelineOptions::new(p.mode) }
}

fn problem_label(system: &PoissonSystem) -> String {
    format!("{0}x{0}", system.unknowns())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub config: ExperimentConfig,
    pub mode: RotationMode,
    pub qubits: usize,
    pub solution: Vec<f64>,
    pub exact: Vec<f64>,
    /// Percent.
    pub rel_error: f64,
    pub sp_simulated: f64,
    pub sp_expected: f64,
    pub sp_empirical: Option<f64>,
    pub sp_analytic_truncated: f64,
    pub sp_analytic_exact: f64,
    pub shots: u64,
    pub kept: u64,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub histogram: BTreeMap<String, u64>,
}

/// Runs the full pipeline and compares against the classical solution.
pub fn solve(config: &ExperimentConfig) -> Result<SolveReport> {
    if config.noise.is_some() {
        return Err(Error::InvalidInput("readout noise models are used by mitigate-demo only".into()));
    }
    let p = prepare(config)?;
    let circuit = build_pipeline_with(&p.system, &p.format, &options(&p))?;
    let state = run_exact(&circuit)?;
    let post = postselect(&state, &circuit.layout)?;
    let run = match p.config.backend {
        Backend::Exact => RunResult {
            solution: post.solution.clone(),
            success_prob: post.success_prob,
            histogram: BTreeMap::new(),
            shots: 0,
            kept: 0,
            seed: None,
            rng: None,
        },
        Backend::Sample => sample_state(&state, &circuit.layout, p.config.shots, p.config.seed)?,
    };
    let exact = exact_solve(&p.system)?;
    Ok(SolveReport {
        mode: p.mode,
        qubits: circuit.num_qubits(),
        rel_error: 100.0 * relative_error(&exact, &run.solution)?,
        sp_simulated: 100.0 * post.success_prob,
        sp_expected: expected_success_probability(&p.eigs, &p.table),
        sp_empirical: (run.shots > 0).then(|| 100.0 * run.kept as f64 / run.shots as f64),
        sp_analytic_truncated: analytic_success_probability(&p.table.effective_lambdas)?,
        sp_analytic_exact: analytic_success_probability(&p.eigs.lambdas)?,
        solution: run.solution,
        exact,
        shots: run.shots,
        kept: run.kept,
        seed: run.seed,
        rng: run.rng,
        histogram: run.histogram,
        config: p.config,
    })
}

pub fn cmd_solve(config: &ExperimentConfig) -> Result<String> {
    let report = solve(config)?;
    match report.config.format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "solution", "exact"])?;
            for (k, (s, e)) in report.solution.iter().zip(&report.exact).enumerate() {
                w.write_record([(k + 1).to_string(), s.to_string(), e.to_string()])?;
            }
            with_header(&report.config, w)
        }
    }
}

/// What to feed the phase-verification circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseInput {
    /// The `j`-th eigenvector (1-based).
    Eigen(usize),
    /// Interior amplitudes `v_1..v_{N−1}`; normalized before use.
    Vector(Vec<f64>),
    /// The problem's right-hand side.
    Rhs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseBin {
    pub bitstring: BitString,
    pub value: u64,
    pub eigenvalue: f64,
    pub probability: f64,
    pub count: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub config: ExperimentConfig,
    pub input: PhaseInput,
    pub bins: Vec<PhaseBin>,
}

/// Probabilities below this are dropped from exact phase histograms.
const PHASE_BIN_FLOOR: f64 = 1e-12;

pub fn verify_phase(config: &ExperimentConfig, input: &PhaseInput) -> Result<PhaseReport> {
    let p = prepare(config)?;
    let interior = match input {
        PhaseInput::Eigen(j) => {
            if *j == 0 || *j > p.eigs.len() {
                return Err(Error::InvalidInput(format!("eigen index {j} out of 1..={}", p.eigs.len())));
            }
            p.eigs.eigvec(*j)
        }
        PhaseInput::Vector(v) => v.clone(),
        PhaseInput::Rhs => p.system.b().to_vec(),
    };
    if interior.len() != p.eigs.len() {
        return Err(Error::InvalidInput(format!(
            "input has {} entries, problem has {}",
            interior.len(),
            p.eigs.len()
        )));
    }
    let norm = interior.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::InvalidInput("input vector is zero".into()));
    }
    let mut amplitudes = vec![0.0];
    amplitudes.extend(interior.iter().map(|x| x / norm));
    let circuit = build_phase_verification_with(&p.system, &p.format, &amplitudes, p.config.oracle.into())?;
    let state = run_exact(&circuit)?;
    let e = circuit.layout.e();
    let probs = state.register_distribution(e.clone());
    let counts = match p.config.backend {
        Backend::Exact => None,
        Backend::Sample => Some(sample_register(&state, e, p.config.shots, p.config.seed)?),
    };
    let m = p.format.m();
    let scale = (-(p.format.f as f64)).exp2();
    let bins = probs
        .iter()
        .enumerate()
        .filter(|(v, &pr)| match &counts {
            Some(c) => c[*v] > 0,
            None => pr > PHASE_BIN_FLOOR,
        })
        .map(|(v, &probability)| {
            Ok(PhaseBin {
                bitstring: BitString::new(v as u64, m)?,
                value: v as u64,
                eigenvalue: v as f64 * scale,
                probability,
                count: counts.as_ref().map(|c| c[v]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseReport { config: p.config, input: input.clone(), bins })
}

pub fn cmd_verify_phase(config: &ExperimentConfig, input: &PhaseInput) -> Result<String> {
    let report = verify_phase(config, input)?;
    match report.config.format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["bitstring", "value", "eigenvalue", "probability", "count"])?;
            for b in &report.bins {
                w.write_record([
                    b.bitstring.to_string(),
                    b.value.to_string(),
                    b.eigenvalue.to_string(),
                    b.probability.to_string(),
                    b.count.map(|c| c.to_string()).unwrap_or_default(),
                ])?;
            }
            with_header(&report.config, w)
        }
    }
}

/// One row per amplification exponent `f` (other settings from `config`).
pub fn sweep(config: &ExperimentConfig, f_values: &[u32]) -> Result<Vec<SweepRow>> {
    if f_values.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one f value".into()));
    }
    f_values
        .iter()
        .map(|&f| {
            let cfg = ExperimentConfig { f, ..config.clone() };
            let report = solve(&cfg)?;
            let p = prepare(&cfg)?;
            let circuit = build_pipeline_with(&p.system, &p.format, &options(&p))?;
            let res = resource_report(&circuit);
            Ok(SweepRow {
                problem: problem_label(&p.system),
                f,
                l: p.format.l,
                mode: p.mode.to_string(),
                rel_error: report.rel_error,
                sp_expected: report.sp_expected,
                sp_analytic_truncated: report.sp_analytic_truncated,
                sp_analytic_exact: report.sp_analytic_exact,
                qubits: res.total_qubits,
                depth: res.depth,
                cnots_est: res.estimated_cnots,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct SweepDocument<'a> {
    config: &'a ExperimentConfig,
    rows: &'a [SweepRow],
}

pub fn cmd_sweep(config: &ExperimentConfig, f_values: &[u32]) -> Result<String> {
    let rows = sweep(config, f_values)?;
    let resolved = config.resolved(&config.system()?);
    match config.format {
        OutputFormat::Json => json(&SweepDocument { config: &resolved, rows: &rows }),
        OutputFormat::Csv => Ok(resolved.summary_line()? + &sweep_csv(&rows)?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourceRow {
    pub problem: String,
    pub n: u32,
    pub f: u32,
    pub l: u32,
    pub mode: RotationMode,
    #[serde(flatten)]
    pub report: ResourceReport,
}

/// System used for a resource row of the given size: the named preset when
/// one exists, otherwise a uniform right-hand side.
pub fn system_for_size(size: usize) -> Result<PoissonSystem> {
    let name = format!("table1-{size}x{size}");
    if PRESETS.contains(&name.as_str()) {
        return preset(&name);
    }
    let cells = size + 1;
    if size == 0 || !cells.is_power_of_two() {
        return Err(Error::InvalidInput(format!("size {size} is not 2^n − 1")));
    }
    PoissonSystem::one_dim(cells.trailing_zeros(), vec![1.0; size])
}

/// Builds (without simulating) one pipeline per size.
pub fn resources(config: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<ResourceRow>> {
    sizes
        .iter()
        .map(|&size| {
            let system = system_for_size(size)?;
            let cfg = ExperimentConfig {
                preset: None,
                n: Some(system.n()),
                b: Some(system.b().to_vec()),
                i: None,
                ..config.clone()
            };
            let p = prepare(&cfg)?;
            let circuit = build_pipeline_with(&p.system, &p.format, &options(&p))?;
            Ok(ResourceRow {
                problem: problem_label(&p.system),
                n: p.system.n(),
                f: p.format.f,
                l: p.format.l,
                mode: p.mode,
                report: resource_report(&circuit),
            })
        })
        .collect()
}

pub const RESOURCE_COLUMNS: [&str; 14] = [
    "problem",
    "n",
    "f",
    "l",
    "mode",
    "qubits",
    "reg_b",
    "reg_e",
    "reg_a",
    "depth",
    "cnots_est",
    "one_qubit_est",
    "fidelity_est",
    "fidelity_log10",
];

#[derive(Debug, Clone, Serialize)]
struct ResourcesDocument<'a> {
    config: &'a ExperimentConfig,
    rows: &'a [ResourceRow],
}

pub fn cmd_resources(config: &ExperimentConfig, sizes: &[usize]) -> Result<String> {
    let rows = resources(config, sizes)?;
    match config.format {
        OutputFormat::Json => json(&ResourcesDocument { config, rows: &rows }),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(RESOURCE_COLUMNS)?;
            for r in &rows {
                let s = &r.report;
                w.write_record([
                    r.problem.clone(),
                    r.n.to_string(),
                    r.f.to_string(),
                    r.l.to_string(),
                    r.mode.to_string(),
                    s.total_qubits.to_string(),
                    s.reg_b.to_string(),
                    s.reg_e.to_string(),
                    s.reg_a.to_string(),
                    s.depth.to_string(),
                    s.estimated_cnots.to_string(),
                    s.estimated_one_qubit.to_string(),
                    format!("{:e}", s.estimated_fidelity),
                    s.fidelity_log10.to_string(),
                ])?;
            }
            with_header(config, w)
        }
    }
}

/// Default readout model for the mitigation demo: `p(0→1) = 0.02`,
/// `p(1→0) = 0.05` on every qubit.
pub const DEMO_P01: f64 = 0.02;
pub const DEMO_P10: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct MitigationReport {
    pub config: ExperimentConfig,
    pub noise: ReadoutModel,
    /// Probabilities over reg B outcomes `0..2^n`.
    pub ideal: Vec<f64>,
    pub noisy: Vec<f64>,
    pub mitigated: Vec<f64>,
    /// Percent, on amplitude magnitudes `√p`.
    pub rel_error_unmitigated: f64,
    pub rel_error_mitigated: f64,
    pub shots: u64,
    pub seed: u64,
    pub rng: String,
}

/// Samples the normalized right-hand side `|b⟩` as measured on reg B, applies
/// readout noise and mitigates it with the known calibration.
pub fn mitigate_demo(config: &ExperimentConfig) -> Result<MitigationReport> {
    let system = config.system()?;
    let resolved = config.resolved(&system);
    let width = system.n() as usize;
    let noise = match &config.noise {
        Some(path) => ReadoutModel::load(path)?,
        None => ReadoutModel::uniform(width, DEMO_P01, DEMO_P10)?,
    };
    if noise.width() != width {
        return Err(Error::InvalidInput(format!(
            "noise model covers {} qubits, register has {width}",
            noise.width()
        )));
    }
    let mut ideal = vec![0.0];
    ideal.extend(system.normalized_b().iter().map(|x| x * x));
    let counts = sample_distribution(&ideal, config.shots, config.seed)?;
    let histogram: BTreeMap<String, u64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (format!("{k:0width$b}"), c))
        .collect();
    let noisy_hist = corrupt(&histogram, &noise, config.seed.wrapping_add(1))?;
    let noisy = histogram_distribution(&noisy_hist, width)?;
    let mitigated = mitigate(&noisy_hist, &calibration_matrix(&noise, width)?)?;
    let amp = |p: &[f64]| p.iter().map(|x| x.max(0.0).sqrt()).collect::<Vec<_>>();
    let reference = amp(&ideal);
    Ok(MitigationReport {
        rel_error_unmitigated: 100.0 * relative_error(&reference, &amp(&noisy))?,
        rel_error_mitigated: 100.0 * relative_error(&reference, &amp(&mitigated))?,
        config: resolved,
        noise,
        ideal,
        noisy,
        mitigated,
        shots: config.shots,
        seed: config.seed,
        rng: RNG_ALGORITHM.to_string(),
    })
}

fn sample_distribution(probs: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    let amps = probs.iter().map(|p| num_complex::Complex64::new(p.sqrt(), 0.0)).collect();
    let state = crate::simulator::Statevector::from_amplitudes(amps)?;
    sample_register(&state, 0..state.num_qubits(), shots, seed)
}

pub fn cmd_mitigate_demo(config: &ExperimentConfig) -> Result<String> {
    let report = mitigate_demo(config)?;
    match report.config.format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["outcome", "ideal", "noisy", "mitigated"])?;
            let width = report.noise.width();
            for k in 0..report.ideal.len() {
                w.write_record([
                    format!("{k:0width$b}"),
                    report.ideal[k].to_string(),
                    report.noisy[k].to_string(),
                    report.mitigated[k].to_string(),
                ])?;
            }
            with_header(&report.config, w)
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn with_header(config: &ExperimentConfig, w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(config.summary_line()? + &String::from_utf8(bytes).expect("csv output is utf-8"))
}

// ---------------------------------------------------------------------------
// command line

#[derive(Debug, Parser)]
#[command(name = "qpoisson", version, about = "Quantum linear solver for the discrete Poisson equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver pipeline and compare with the classical solution.
    Solve(CommonArgs),
    /// Phase estimation alone: histogram of the eigenvalue register.
    VerifyPhase {
        #[command(flatten)]
        common: CommonArgs,
        /// Use the j-th eigenvector (1-based) as input.
        #[arg(long, conflicts_with = "vector")]
        eigen: Option<usize>,
        /// Interior input amplitudes (normalized before use).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        vector: Option<Vec<f64>>,
    },
    /// Relative error and success probability across amplification exponents.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "f-values", value_delimiter = ',', default_values_t = [0u32, 4, 8])]
        f_values: Vec<u32>,
    },
    /// Qubit, depth and CNOT estimates across problem sizes.
    Resources {
        #[command(flatten)]
        common: CommonArgs,
        /// Problem sizes N − 1 (default: the configured problem).
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Readout noise on the sampled input state, with and without mitigation.
    MitigateDemo(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,
    #[arg(long)]
    pub i: Option<u32>,
    #[arg(long)]
    pub f: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
    #[arg(long, value_enum)]
    pub oracle: Option<OracleChoice>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl CommonArgs {
    /// Config file (or defaults) with every given flag applied on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if self.preset.is_some() {
            c.preset = self.preset.clone();
            c.n = None;
            c.b = None;
        }
        if self.n.is_some() || self.b.is_some() {
            c.preset = None;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    c.$field = Some(v.clone());
                }
            )*};
        }
        set!(n, b, i, noise, output);
        macro_rules! set_plain {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        set_plain!(d, f, l, mode, oracle, backend, shots, seed, format);
        Ok(c)
    }
}

/// Runs a parsed command line, returning the text to emit.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let (common, text) = match &cli.command {
        Command::Solve(common) => (common, cmd_solve(&common.resolve()?)),
        Command::VerifyPhase { common, eigen, vector } => {
            let input = match (eigen, vector) {
                (Some(j), _) => PhaseInput::Eigen(*j),
                (None, Some(v)) => PhaseInput::Vector(v.clone()),
                (None, None) => PhaseInput::Rhs,
            };
            let mut config = common.resolve()?;
            // A bare vector defines its own problem size.
            if let (PhaseInput::Vector(v), None, None, None) = (&input, &config.preset, &config.n, &config.b) {
                config.b = Some(vec![1.0; v.len()]);
            }
            (common, cmd_verify_phase(&config, &input))
        }
        Command::Sweep { common, f_values } => (common, cmd_sweep(&common.resolve()?, f_values)),
        Command::Resources { common, sizes } => {
            let config = common.resolve()?;
            let sizes = match sizes {
                Some(s) => s.clone(),
                None => vec![config.system()?.unknowns()],
            };
            (common, cmd_resources(&config, &sizes))
        }
        Command::MitigateDemo(common) => (common, cmd_mitigate_demo(&common.resolve()?)),
    };
    Ok((text?, common.resolve()?.output))
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// code (0 success, 2 invalid input, 3 resource limits).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(&cli).and_then(|(text, output)| match output {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
