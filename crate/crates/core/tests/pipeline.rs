use num_complex::Complex64;
use proptest::prelude::*;

use qpoisson::analytics::{predicted_solution, relative_error};
use qpoisson::circuit::{
    build_phase_verification_with, build_pipeline, build_pipeline_with, PhaseOracle, PipelineOptions, RotationMode,
};
use qpoisson::encoding::{build_angle_table, FixedPointFormat};
use qpoisson::model::{eigenpairs, PoissonSystem};
use qpoisson::simulator::{apply_gate, postselect, run_exact, Statevector};

fn table1_small() -> PoissonSystem {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PoissonSystem::one_dim(2, vec![h, 0.5, 0.5]).unwrap()
}

#[test]
fn pipeline_is_unitary_at_tiny_scale() {
    let system = PoissonSystem::one_dim(1, vec![1.0]).unwrap();
    let fmt = FixedPointFormat::new(4, 0, 4).unwrap();
    for mode in [RotationMode::Explicit, RotationMode::Fused] {
        let circuit = build_pipeline(&system, &fmt, mode).unwrap();
        let dim = 1usize << circuit.num_qubits();
        let columns: Vec<Vec<Complex64>> = (0..dim)
            .map(|basis| {
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                amps[basis] = Complex64::new(1.0, 0.0);
                let mut state = Statevector::from_amplitudes(amps).unwrap();
                for g in circuit.gates() {
                    apply_gate(&mut state, g).unwrap();
                }
                state.amplitudes().to_vec()
            })
            .collect();
        for a in 0..dim {
            for b in a..dim {
                let dot: Complex64 = columns[a].iter().zip(&columns[b]).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-10, "{mode}: ⟨{a}|{b}⟩ = {dot}");
            }
        }
    }
}

#[test]
fn work_registers_are_uncomputed() {
    let systems = [table1_small(), PoissonSystem::one_dim(3, [vec![0.25; 4], vec![0.5; 3]].concat()).unwrap()];
    for system in &systems {
        for (f, mode) in [(0, RotationMode::Explicit), (4, RotationMode::Fused)] {
            let fmt = FixedPointFormat::for_grid(system.n(), f, 10).unwrap();
            let c = build_pipeline(system, &fmt, mode).unwrap();
            let post = postselect(&run_exact(&c).unwrap(), &c.layout).unwrap();
            assert!(post.leakage < 1e-9, "n={} f={f} {mode}: leakage {}", system.n(), post.leakage);
        }
    }
}

#[test]
fn circuit_followed_by_inverse_is_identity() {
    let system = table1_small();
    let fmt = FixedPointFormat::for_grid(2, 2, 8).unwrap();
    let c = build_pipeline(&system, &fmt, RotationMode::Explicit).unwrap();
    let mut state = run_exact(&c).unwrap();
    for g in c.inverse().gates() {
        apply_gate(&mut state, g).unwrap();
    }
    assert!((state.amplitudes()[0] - 1.0).norm() < 1e-10);
}

#[test]
fn simulation_matches_spectral_prediction() {
    let system = table1_small();
    let eigs = eigenpairs(&system).unwrap();
    for f in [0, 4, 8] {
        let fmt = FixedPointFormat::for_grid(2, f, 16).unwrap();
        let table = build_angle_table(&eigs, &fmt).unwrap();
        let c = build_pipeline(&system, &fmt, RotationMode::Fused).unwrap();
        let post = postselect(&run_exact(&c).unwrap(), &c.layout).unwrap();
        let e = relative_error(&predicted_solution(&eigs, &table), &post.solution).unwrap();
        assert!(e < 1e-10, "f={f}: {e}");
    }
}

#[test]
fn oracles_agree_when_eigenvalues_are_exact() {
    // N = 2 has the single eigenvalue 8, which both phase oracles encode
    // without truncation.
    let system = PoissonSystem::one_dim(1, vec![1.0]).unwrap();
    let fmt = FixedPointFormat::for_grid(1, 0, 8).unwrap();
    let states: Vec<Statevector> = [PhaseOracle::Encoded, PhaseOracle::TrueOperator]
        .iter()
        .map(|&oracle| {
            let options = PipelineOptions { oracle, ..PipelineOptions::new(RotationMode::Explicit) };
            run_exact(&build_pipeline_with(&system, &fmt, &options).unwrap()).unwrap()
        })
        .collect();
    for (a, b) in states[0].amplitudes().iter().zip(states[1].amplitudes()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn true_operator_phase_peaks_next_to_truncated_value() {
    let system = table1_small();
    let eigs = eigenpairs(&system).unwrap();
    let fmt = FixedPointFormat::for_grid(2, 0, 10).unwrap();
    let mut input = vec![0.0];
    input.extend(eigs.eigvec(1));
    let c = build_phase_verification_with(&system, &fmt, &input, PhaseOracle::TrueOperator).unwrap();
    let probs = run_exact(&c).unwrap().register_distribution(c.layout.e());
    // λ₁ = 9.37: the two neighbouring bins carry most of the weight.
    assert!(probs[9] + probs[10] > 0.8, "{} {}", probs[9], probs[10]);
    assert!(probs[9] < 1.0 - 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_inputs_follow_prediction(raw in proptest::collection::vec(-1.0f64..1.0, 3), f in 0u32..4) {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let system = PoissonSystem::one_dim(2, raw).unwrap();
        let eigs = eigenpairs(&system).unwrap();
        let fmt = FixedPointFormat::for_grid(2, f, 8).unwrap();
        let table = build_angle_table(&eigs, &fmt).unwrap();
        for mode in [RotationMode::Explicit, RotationMode::Fused] {
            let c = build_pipeline(&system, &fmt, mode).unwrap();
            let post = postselect(&run_exact(&c).unwrap(), &c.layout).unwrap();
            let e = relative_error(&predicted_solution(&eigs, &table), &post.solution).unwrap();
            prop_assert!(e < 1e-9);
            prop_assert!(post.leakage < 1e-9);
        }
    }
}
