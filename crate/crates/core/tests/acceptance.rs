//! Acceptance criteria, one PASS/FAIL line each.
//!
//! The report goes straight to stderr so it shows up even when the harness
//! captures test output.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use qpoisson::analytics::{analytic_success_probability, expected_success_probability, relative_error, resource_report};
use qpoisson::circuit::{build_phase_verification, build_pipeline, Circuit, RotationMode};
use qpoisson::cli::{mitigate_demo, preset, resources, ExperimentConfig, ModeChoice};
use qpoisson::encoding::{
    amplify_encode, build_angle_table, distinguishing_prefix, prune_zero_columns, BitString, FixedPointFormat,
};
use qpoisson::model::{build_matrix, eigenpairs, exact_solve, PoissonSystem};
use qpoisson::noise::{fidelity_estimate, is_washed_out, REFERENCE_CNOT_ACCURACY};
use qpoisson::simulator::{postselect, run_exact, sample_register, sample_state, Statevector};

/// Criteria whose literal statement cannot hold; see the message for why.
/// The runner requires these to keep failing so a change in behaviour is
/// noticed either way.
const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[(
    "5c",
    "expected SP = Σβ²sin²(πω̂) ≈ Σβ²/λ̂² and λ̂ only grows with f, so the value \
     cannot increase with f; its limit is Σβ²/λ², not Σ1/λ²",
)];

fn say(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

struct Report {
    lines: Vec<(String, bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        say(&format!("[{}] criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" }));
        self.lines.push((id.to_string(), ok, detail));
    }
}

/// Pipeline run kept for reuse across criteria.
struct Run {
    solution: Vec<f64>,
    success_prob: f64,
    sp_expected: f64,
    exact: Vec<f64>,
}

fn run_pipeline(system: &PoissonSystem, f: u32, l: u32, mode: RotationMode) -> Run {
    let fmt = FixedPointFormat::for_grid(system.n(), f, l).unwrap();
    let circuit = build_pipeline(system, &fmt, mode).unwrap();
    let post = postselect(&run_exact(&circuit).unwrap(), &circuit.layout).unwrap();
    let eigs = eigenpairs(system).unwrap();
    let table = build_angle_table(&eigs, &fmt).unwrap();
    Run {
        solution: post.solution,
        success_prob: post.success_prob,
        sp_expected: expected_success_probability(&eigs, &table),
        exact: lu_solve(system),
    }
}

/// Independent classical oracle: dense LU on the assembled matrix.
fn lu_solve(system: &PoissonSystem) -> Vec<f64> {
    let a = build_matrix(system).unwrap();
    let x = a.lu().solve(&DVector::from_column_slice(system.b())).unwrap();
    let norm = x.norm();
    x.iter().map(|v| v / norm).collect()
}

fn four_sigma(p: f64, shots: u64) -> f64 {
    4.0 * (p * (1.0 - p) / shots as f64).sqrt()
}

/// `x` rounded to four significant figures.
fn sig4(x: f64) -> String {
    let decimals = (3 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Amplitudes of `|1⟩_anc |0⟩_work |k⟩_B`, i.e. the post-selected branch
/// before renormalization.
fn branch_amplitudes(state: &Statevector, circuit: &Circuit) -> Vec<Complex64> {
    let anc = 1usize << circuit.layout.ancilla();
    (0..1usize << circuit.layout.reg_b).map(|k| state.amplitudes()[anc | k]).collect()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let mut worst_val = 0.0f64;
    let mut worst_vec = 0.0f64;
    for n in 1..=6u32 {
        let dim = (1usize << n) - 1;
        let system = PoissonSystem::one_dim(n, vec![1.0; dim]).unwrap();
        let eigs = eigenpairs(&system).unwrap();
        let a = build_matrix(&system).unwrap();
        let numeric = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&x, &y| numeric.eigenvalues[x].total_cmp(&numeric.eigenvalues[y]));
        let scale = eigs.lambdas[dim - 1];
        for (j, &k) in order.iter().enumerate() {
            // Relative to the spectral radius: the numeric solver is only
            // accurate to ε·‖A‖.
            worst_val = worst_val.max((eigs.lambdas[j] - numeric.eigenvalues[k]).abs() / scale);
            let closed = DVector::from_vec(eigs.eigvec(j + 1));
            let overlap = closed.dot(&numeric.eigenvectors.column(k)).abs();
            worst_vec = worst_vec.max((1.0 - overlap).abs());
            let residual = &a * &closed - &closed * eigs.lambdas[j];
            worst_vec = worst_vec.max(residual.norm() / scale);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(
        "1",
        worst_val < 1e-9 && worst_vec < 1e-9 && secs < 1.0,
        format!("eigenvalue dev {worst_val:.2e}, eigenvector dev {worst_vec:.2e}, {secs:.3}s (tol 1e-9, <1s)"),
    );
}

fn criterion_2(r: &mut Report) {
    let system = preset("table1-3x3").unwrap();
    let fmt = FixedPointFormat::for_grid(2, 0, 10).unwrap();
    let eigs = eigenpairs(&system).unwrap();
    let expected = [9usize, 32, 54];
    let mut worst = 0.0f64;
    for (j, &bin) in expected.iter().enumerate() {
        let mut input = vec![0.0];
        input.extend(eigs.eigvec(j + 1));
        let c = build_phase_verification(&system, &fmt, &input).unwrap();
        let probs = run_exact(&c).unwrap().register_distribution(c.layout.e());
        worst = worst.max((probs[bin] - 1.0).abs());
    }
    let input = [0.0, 1.0, 0.0, 0.0];
    let c = build_phase_verification(&system, &fmt, &input).unwrap();
    let state = run_exact(&c).unwrap();
    let probs = state.register_distribution(c.layout.e());
    let mixed = [0.25, 0.5, 0.25];
    for (bin, p) in expected.iter().zip(mixed) {
        worst = worst.max((probs[*bin] - p).abs());
    }
    let shots = 100_000;
    let counts = sample_register(&state, c.layout.e(), shots, 7).unwrap();
    let sampled_ok = expected.iter().zip(mixed).all(|(&bin, p)| {
        (counts[bin] as f64 / shots as f64 - p).abs() <= four_sigma(p, shots)
    }) && expected.iter().map(|&b| counts[b]).sum::<u64>() == shots;
    r.check(
        "2",
        worst < 1e-10 && sampled_ok,
        format!(
            "bins {{9,32,54}}: max exact deviation {worst:.1e} (tol 1e-10); sampled {:?} at 1e5 shots within 4σ: {sampled_ok}",
            expected.iter().map(|&b| counts[b]).collect::<Vec<_>>()
        ),
    );
}

fn criterion_3(r: &mut Report, runs: &BTreeMap<(&str, u32), Run>, secs: f64) {
    let limits = [("table1-3x3", 0.2), ("table1-7x7", 0.5), ("table1-15x15", 1.5)];
    let mut ok = secs < 60.0;
    let mut parts = vec![];
    for (name, limit) in limits {
        let run = &runs[&(name, 8)];
        let err = 100.0 * relative_error(&run.exact, &run.solution).unwrap();
        ok &= err <= limit;
        parts.push(format!("{name} {err:.4}% (≤ {limit}%)"));
    }
    r.check("3", ok, format!("{}, {secs:.1}s (< 60s)", parts.join(", ")));
}

fn criterion_4(r: &mut Report, runs: &BTreeMap<(&str, u32), Run>) {
    let mut ok = true;
    let mut parts = vec![];
    for name in ["table1-7x7", "table1-15x15"] {
        let errs: Vec<f64> = [0, 4, 8]
            .iter()
            .map(|&f| {
                let run = &runs[&(name, f)];
                100.0 * relative_error(&run.exact, &run.solution).unwrap()
            })
            .collect();
        ok &= errs.windows(2).all(|w| w[1] <= w[0]);
        parts.push(format!("{name} {:.4}% → {:.4}% → {:.4}%", errs[0], errs[1], errs[2]));
        if name == "table1-7x7" {
            let factor = errs[0] / errs[2];
            ok &= factor >= 3.0;
            parts.push(format!("7x7 improvement ×{factor:.1} (≥ 3)"));
        }
    }
    r.check("4", ok, parts.join("; "));
}

fn criterion_5(r: &mut Report, runs: &BTreeMap<(&str, u32), Run>) {
    // (a) analytic values.
    let truncated = |name: &str| {
        let system = preset(name).unwrap();
        let eigs = eigenpairs(&system).unwrap();
        let fmt = FixedPointFormat::for_grid(system.n(), 0, 16).unwrap();
        analytic_success_probability(&build_angle_table(&eigs, &fmt).unwrap().effective_lambdas).unwrap()
    };
    let exact = |name: &str| analytic_success_probability(&eigenpairs(&preset(name).unwrap()).unwrap().lambdas).unwrap();
    let values = [
        ("3x3 truncated", truncated("table1-3x3"), "1.367"),
        ("7x7 truncated", truncated("table1-7x7"), "1.337"),
        ("7x7 exact", exact("table1-7x7"), "1.154"),
        ("15x15 exact", exact("table1-15x15"), "1.122"),
    ];
    let ok_a = values.iter().all(|(_, v, want)| sig4(*v) == *want);
    r.check(
        "5a",
        ok_a,
        values.iter().map(|(k, v, want)| format!("{k} {}% (want {want}%)", sig4(*v))).collect::<Vec<_>>().join(", "),
    );

    // (b) spectral prediction equals the simulated post-selection probability.
    let worst = runs.values().map(|run| (run.sp_expected / 100.0 - run.success_prob).abs()).fold(0.0, f64::max);
    r.check("5b", worst < 1e-9, format!("max |expected − simulated| = {worst:.1e} over {} runs (tol 1e-9)", runs.len()));

    // (c) expected SP rising with f toward the exact-λ analytic value.
    let mut ok_c = true;
    let mut parts = vec![];
    for name in ["table1-7x7", "table1-15x15"] {
        let sp: Vec<f64> = [0, 4, 8].iter().map(|&f| runs[&(name, f)].sp_expected).collect();
        let target = exact(name);
        let rising = sp.windows(2).all(|w| w[1] > w[0]);
        let closer = (sp[2] - target).abs() < (sp[0] - target).abs();
        ok_c &= rising && closer;
        parts.push(format!("{name} {:.4}% → {:.4}% → {:.4}% (target {target:.4}%)", sp[0], sp[1], sp[2]));
    }
    r.check("5c", ok_c, format!("expected SP increasing in f toward analytic: {}", parts.join("; ")));

    // The achievable form of the trend: analytic SP over the truncated
    // eigenvalues approaches the exact value monotonically.
    let mut ok_c2 = true;
    let mut parts = vec![];
    for name in ["table1-7x7", "table1-15x15"] {
        let system = preset(name).unwrap();
        let eigs = eigenpairs(&system).unwrap();
        let sp: Vec<f64> = [0, 4, 8]
            .iter()
            .map(|&f| {
                let fmt = FixedPointFormat::for_grid(system.n(), f, 16).unwrap();
                analytic_success_probability(&build_angle_table(&eigs, &fmt).unwrap().effective_lambdas).unwrap()
            })
            .collect();
        let target = exact(name);
        let gaps: Vec<f64> = sp.iter().map(|v| v - target).collect();
        ok_c2 &= gaps.iter().all(|g| *g >= 0.0) && gaps.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("{name} {:.4}% → {:.4}% → {:.4}% (→ {target:.4}%)", sp[0], sp[1], sp[2]));
    }
    r.check("5c'", ok_c2, format!("truncated analytic SP converging monotonically: {}", parts.join("; ")));

    // (d) measured-scale value for the smallest problem.
    let sp = runs[&("table1-3x3", 0)].sp_expected;
    r.check("5d", (1.05..=1.20).contains(&sp), format!("3x3 f=0 l=10 expected SP {sp:.4}% ∈ [1.05, 1.20]"));
}

fn criterion_6(r: &mut Report) {
    let system = preset("table1-3x3").unwrap();
    let mut worst = 0.0f64;
    for f in [0, 4] {
        let fmt = FixedPointFormat::for_grid(2, f, 10).unwrap();
        let amps: Vec<Vec<Complex64>> = [RotationMode::Explicit, RotationMode::Fused]
            .iter()
            .map(|&mode| {
                let c = build_pipeline(&system, &fmt, mode).unwrap();
                branch_amplitudes(&run_exact(&c).unwrap(), &c)
            })
            .collect();
        for (a, b) in amps[0].iter().zip(&amps[1]) {
            worst = worst.max((a - b).norm());
        }
    }
    r.check("6", worst < 1e-9, format!("max explicit/fused branch amplitude difference {worst:.1e} (tol 1e-9)"));
}

fn criterion_7(r: &mut Report) {
    let system = preset("table1-3x3").unwrap();
    let fmt = FixedPointFormat::for_grid(2, 0, 10).unwrap();
    let circuit = build_pipeline(&system, &fmt, RotationMode::Explicit).unwrap();
    let state = run_exact(&circuit).unwrap();
    let shots = 1_000_000;
    let result = sample_state(&state, &circuit.layout, shots, 2024).unwrap();

    // Exact outcome distribution over ancilla ‖ reg B.
    let n = circuit.layout.reg_b;
    let anc = circuit.layout.ancilla();
    let mut exact = vec![0.0; 2 << n];
    for (i, a) in state.amplitudes().iter().enumerate() {
        exact[(((i >> anc) & 1) << n) | (i & ((1 << n) - 1))] += a.norm_sqr();
    }
    let p = postselect(&state, &circuit.layout).unwrap().success_prob;
    let emp = result.kept as f64 / shots as f64;
    let mut ok = (emp - p).abs() <= four_sigma(p, shots);
    let mut worst = (emp - p).abs() / four_sigma(p, shots);
    for (outcome, &q) in exact.iter().enumerate() {
        let key = format!("{outcome:0width$b}", width = n + 1);
        let freq = result.histogram.get(&key).copied().unwrap_or(0) as f64 / shots as f64;
        let band = four_sigma(q, shots);
        if band > 0.0 {
            worst = worst.max((freq - q).abs() / band);
        }
        ok &= (freq - q).abs() <= band;
    }
    r.check(
        "7",
        ok,
        format!("empirical SP {:.4}% vs {:.4}%; worst deviation {:.2} of the 4σ band over {} outcomes", 100.0 * emp, 100.0 * p, worst, exact.len()),
    );
}

fn criterion_8(r: &mut Report) {
    let bits = |s: &str| BitString::parse(s).unwrap();
    let lambda = 23.0 + bits("11011011101011").value() as f64 / 2f64.powi(14);
    let truncation = [(0, "010111"), (4, "0101111101"), (8, "01011111011011")].iter().all(|&(f, want)| {
        amplify_encode(lambda, &FixedPointFormat::new(6, f, 16).unwrap()).unwrap().to_string() == want
    });
    let (kept, _) = prune_zero_columns(&[bits("0000100110"), bits("0000001010"), bits("0000000101")]).unwrap();
    let prefix = distinguishing_prefix(&[bits("001001"), bits("100000"), bits("110110")]).unwrap();
    r.check(
        "8",
        truncation && kept == vec![5, 7, 8, 9, 10] && prefix == 2,
        format!("truncation bit-exact: {truncation}; kept columns {kept:?}; prefix {prefix}"),
    );
}

fn criterion_9(r: &mut Report) {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for seed in 0..10 {
        let cfg = ExperimentConfig { shots: 100_000, seed, ..ExperimentConfig::with_preset("table1-3x3") };
        let rep = mitigate_demo(&cfg).unwrap();
        ok &= rep.rel_error_mitigated < rep.rel_error_unmitigated;
        worst_ratio = worst_ratio.max(rep.rel_error_mitigated / rep.rel_error_unmitigated);
    }
    r.check("9", ok, format!("mitigated < unmitigated for 10/10 seeds: {ok}; worst mitigated/unmitigated ratio {worst_ratio:.3}"));
}

fn criterion_10(r: &mut Report) {
    let cfg = ExperimentConfig { f: 8, l: 16, mode: ModeChoice::Fused, ..ExperimentConfig::default() };
    let rows = resources(&cfg, &[3, 7, 15]).unwrap();
    let affine = rows.iter().all(|row| row.report.total_qubits as u32 == 3 * row.n + 3 + cfg.f);
    let qubits: Vec<usize> = rows.iter().map(|row| row.report.total_qubits).collect();
    let depth: Vec<u64> = rows.iter().map(|row| row.report.depth).collect();
    let cnots: Vec<u64> = rows.iter().map(|row| row.report.estimated_cnots).collect();
    let increasing = depth.windows(2).all(|w| w[1] > w[0]) && cnots.windows(2).all(|w| w[1] > w[0]);

    let system = preset("table1-3x3").unwrap();
    let explicit = build_pipeline(&system, &FixedPointFormat::for_grid(2, 8, 16).unwrap(), RotationMode::Explicit).unwrap();
    let c = resource_report(&explicit).estimated_cnots;
    let magnitude = (550..=55_000).contains(&c);

    let f1 = fidelity_estimate(1, REFERENCE_CNOT_ACCURACY).unwrap();
    let f10 = fidelity_estimate(10, REFERENCE_CNOT_ACCURACY).unwrap();
    let f_5500 = fidelity_estimate(5500, REFERENCE_CNOT_ACCURACY).unwrap();
    let fidelity = (f1 - 0.92).abs() < 1e-15
        && (f10 - 0.92f64.powi(10)).abs() < 1e-15
        && is_washed_out(f_5500)
        && fidelity_estimate(0, REFERENCE_CNOT_ACCURACY).unwrap() == 1.0;
    r.check(
        "10",
        affine && increasing && magnitude && fidelity,
        format!(
            "fused f=8 qubits {qubits:?} = 3n+3+f: {affine}; depth {depth:?}, CNOTs {cnots:?} increasing: {increasing}; \
             3x3 explicit CNOTs {c} vs 5.5k within 10×: {magnitude}; 0.92^c checks: {fidelity}"
        ),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { lines: vec![] };
    criterion_1(&mut report);
    criterion_2(&mut report);

    // Reference format (f = 8, l = 16, fused), plus the f sweep for the larger
    // problems and the l = 10 runs of the smallest one.
    let start = Instant::now();
    let mut runs = BTreeMap::new();
    for name in ["table1-3x3", "table1-7x7", "table1-15x15"] {
        runs.insert((name, 8), run_pipeline(&preset(name).unwrap(), 8, 16, RotationMode::Fused));
    }
    let table1_secs = start.elapsed().as_secs_f64();
    for name in ["table1-7x7", "table1-15x15"] {
        for f in [0, 4] {
            runs.insert((name, f), run_pipeline(&preset(name).unwrap(), f, 16, RotationMode::Fused));
        }
    }
    runs.insert(("table1-3x3", 0), run_pipeline(&preset("table1-3x3").unwrap(), 0, 10, RotationMode::Explicit));
    // The library's tridiagonal solve must agree with the dense LU oracle.
    for name in ["table1-3x3", "table1-7x7", "table1-15x15"] {
        let system = preset(name).unwrap();
        let diff = relative_error(&lu_solve(&system), &exact_solve(&system).unwrap()).unwrap();
        assert!(diff < 1e-12, "{name}: {diff}");
    }

    criterion_3(&mut report, &runs, table1_secs);
    criterion_4(&mut report, &runs);
    criterion_5(&mut report, &runs);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    criterion_10(&mut report);

    let passed = report.lines.iter().filter(|l| l.1).count();
    say(&format!("acceptance: {passed}/{} checks passed", report.lines.len()));
    for (id, why) in KNOWN_UNATTAINABLE {
        say(&format!("  known unattainable {id}: {why}"));
    }

    let unexpected: Vec<&str> = report
        .lines
        .iter()
        .filter(|(id, ok, _)| *ok == KNOWN_UNATTAINABLE.iter().any(|(k, _)| k == id))
        .map(|(id, _, _)| id.as_str())
        .collect();
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
