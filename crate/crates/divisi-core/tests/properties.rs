//! Cross-module invariants exercised on seeded random ensembles.

use divisi_core::channels::{KrausChannel, MixedUnitarySpec, UnitaryDilation};
use divisi_core::divisibility::{
    contraction_check, hs_distance_sq, probe_step, theorem1_identity, theorem2_report,
    trace_distance, Metric, StepVerdict,
};
use divisi_core::random::{random_density, random_hermitian, random_pure, random_unitary};
use divisi_core::scenarios::{build_scenario, run_scenario, Mode, ScenarioName};
use divisi_core::states::{Bipartition, DensityMatrix, PureState, Subsystem};
use divisi_core::{c64, ComplexMatrix};

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_mixed_unitary(
    terms: usize,
    qubits: usize,
    rng: &mut ChaCha8Rng,
) -> MixedUnitarySpec {
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= sum;
    }
    let head: f64 = weights[..terms - 1].iter().sum();
    weights[terms - 1] = 1.0 - head;
    let unitaries = (0..terms).map(|_| random_unitary(1 << qubits, rng)).collect();
    MixedUnitarySpec::new(weights, unitaries).unwrap()
}

#[test]
fn spectrum_is_invariant_under_unitary_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for dim in [2usize, 4, 8] {
        for _ in 0..10 {
            let h = random_hermitian(dim, &mut rng);
            let u = random_unitary(dim, &mut rng);
            let conj = u.adjoint().mul(&h).unwrap().mul(&u).unwrap();
            let ev1 = h.hermitian_eigvals(1e-9).unwrap();
            let ev2 = conj.hermitian_eigvals(1e-9).unwrap();
            for (a, b) in ev1.iter().zip(&ev2) {
                assert!((a - b).abs() < 1e-10, "dim {dim}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn dilation_and_kraus_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..40 {
        let (ns, ne) = if rng.gen() { (1usize, 1usize) } else { (2, 1) };
        let dim = 1usize << (ns + ne);
        let env = random_density(ne, &mut rng);
        let d = UnitaryDilation::new(
            random_unitary(dim, &mut rng),
            Bipartition::contiguous(ns, ne).unwrap(),
            env,
        )
        .unwrap();
        let k = d.to_kraus().unwrap();
        let sigma = random_density(ns, &mut rng);
        let via_kraus = k.apply(&sigma).unwrap();
        let joint = d.joint_evolve(&d.product_input(&sigma).unwrap()).unwrap();
        let via_trace = joint.partial_trace(d.split(), Subsystem::System).unwrap();
        assert!(via_kraus.mat().approx_eq(via_trace.mat(), 1e-10));
    }
}

#[test]
fn cptp_channels_contract_trace_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(207);
    for trial in 0..200 {
        let qubits = 1 + (trial % 2);
        let terms = 2 + (trial % 3);
        let k = random_mixed_unitary(terms, qubits, &mut rng).kraus().unwrap();
        let a = random_density(qubits, &mut rng);
        let b = random_density(qubits, &mut rng);
        let slack = contraction_check(&k, &a, &b).unwrap();
        assert!(slack >= -1e-9, "trial {trial}: slack {slack}");
    }
}

#[test]
fn mixed_unitary_channels_are_unital_and_purity_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for trial in 0..100 {
        let qubits = 1 + (trial % 2);
        let terms = 2 + (trial % 3);
        let spec = random_mixed_unitary(terms, qubits, &mut rng);
        assert!(spec.kraus().unwrap().is_unital(1e-9).unwrap().unital);
        let sigma = random_density(qubits, &mut rng);
        let (lhs, rhs) = theorem1_identity(&spec, &sigma).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10, "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn joint_unitaries_preserve_both_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(213);
    for _ in 0..30 {
        let d = UnitaryDilation::new(
            random_unitary(8, &mut rng),
            Bipartition::contiguous(2, 1).unwrap(),
            DensityMatrix::maximally_mixed(1).unwrap(),
        )
        .unwrap();
        let s1 = random_density(3, &mut rng);
        let s2 = random_density(3, &mut rng);
        let r1 = d.joint_evolve(&s1).unwrap();
        let r2 = d.joint_evolve(&s2).unwrap();
        assert!((trace_distance(&s1, &s2).unwrap() - trace_distance(&r1, &r2).unwrap()).abs() < 1e-10);
        assert!((hs_distance_sq(&s1, &s2).unwrap() - hs_distance_sq(&r1, &r2).unwrap()).abs() < 1e-10);
    }
}

/// The three bundled scenarios never show simultaneous system and
/// environment growth; the random sweep only reports its counts, since the
/// general exclusivity claim is not assertable from the product bounds
/// alone.
#[test]
fn step_exclusivity_asserted_on_scenarios_reported_on_random_sweep() {
    for name in ScenarioName::ALL {
        for mode in [Mode::Exact, Mode::PaperTruncated] {
            let rep = run_scenario(&build_scenario(name, mode), Metric::TraceNorm).unwrap();
            assert!(
                !(rep.step.sys_verdict == StepVerdict::PIndivisibleStep
                    && rep.step.env_verdict == StepVerdict::PIndivisibleStep),
                "{name:?}/{mode:?}: both marginals grew"
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(217);
    let mut both_grew = 0u32;
    let mut eq6_positive = 0u32;
    let mut eq7_positive = 0u32;
    let mut ts_te_violated = 0u32;
    let total = 500;
    for trial in 0..total {
        let (ns, ne) = if trial % 2 == 0 { (2usize, 1usize) } else { (1, 1) };
        let n = ns + ne;
        let d = UnitaryDilation::new(
            random_unitary(1 << n, &mut rng),
            Bipartition::contiguous(ns, ne).unwrap(),
            DensityMatrix::maximally_mixed(ne).unwrap(),
        )
        .unwrap();
        let s1 = random_pure(n, &mut rng).to_density();
        let s2 = random_pure(n, &mut rng).to_density();
        let rep = probe_step(&d, &s1, &s2, Metric::TraceNorm).unwrap();
        if rep.sys_verdict == StepVerdict::PIndivisibleStep
            && rep.env_verdict == StepVerdict::PIndivisibleStep
        {
            both_grew += 1;
        }
        let ledger = theorem2_report(&d, &s1, &s2).unwrap();
        assert!(ledger.product_bound_in, "trial {trial}");
        assert!(ledger.product_bound_out, "trial {trial}");
        if ledger.eq6_lhs > 0.0 {
            eq6_positive += 1;
        }
        if ledger.eq7_lhs > 0.0 {
            eq7_positive += 1;
        }
        if !ledger.ts_te_bound {
            ts_te_violated += 1;
        }
    }
    println!(
        "random sweep ({total} correlated pure pairs): both-marginals-grew {both_grew}, \
         eq6 lhs > 0 in {eq6_positive}, eq7 lhs > 0 in {eq7_positive}, \
         T_S*T_E > T_SE in {ts_te_violated}"
    );
}

#[test]
fn scenario_ledgers_satisfy_all_bounds_with_nonnegative_slack() {
    for name in ScenarioName::ALL {
        let scenario = build_scenario(name, Mode::Exact);
        let d = scenario.dilation().unwrap();
        let ledger = theorem2_report(&d, &scenario.s1, &scenario.s2).unwrap();
        assert!((ledger.gamma - ledger.gamma_out).abs() < 1e-10, "{name:?}");
        // GHZ sits exactly on the input product bound, so allow roundoff
        assert!(ledger.product_bound_in_slack >= -1e-12, "{name:?}");
        assert!(ledger.product_bound_out_slack >= -1e-12, "{name:?}");
        assert!(ledger.ts_te_slack >= -1e-12, "{name:?}");
        assert!(ledger.product_bound_in && ledger.product_bound_out && ledger.ts_te_bound);
    }
}

#[test]
fn uncorrelated_witness_growth_is_bounded_by_data_processing() {
    use divisi_core::divisibility::{witness_search, WitnessConfig};
    let mut rng = ChaCha8Rng::seed_from_u64(219);
    for trial in 0..25 {
        let d = UnitaryDilation::new(
            random_unitary(4, &mut rng),
            Bipartition::contiguous(1, 1).unwrap(),
            random_density(1, &mut rng),
        )
        .unwrap();
        let cfg = WitnessConfig {
            restarts: 2,
            iters: 40,
            seed: trial,
            correlated: false,
            ..Default::default()
        };
        let res = witness_search(&d, &cfg).unwrap();
        assert!(res.growth <= 1e-9, "trial {trial}: growth {}", res.growth);
        // the stored pair is in the joint space, so the probe recomputes it
        let rep = probe_step(&d, &res.state1, &res.state2, Metric::TraceNorm).unwrap();
        assert!((res.growth - (rep.d_sys_out - rep.d_sys_in)).abs() < 1e-10);
    }
}

/// Full-space distance is preserved within the mode's tolerance band even
/// for truncated operators.
#[test]
fn full_distance_preserved_in_every_mode() {
    for name in ScenarioName::ALL {
        for (mode, tol) in [(Mode::Exact, 1e-10), (Mode::PaperTruncated, 2e-3)] {
            let rep = run_scenario(&build_scenario(name, mode), Metric::TraceNorm).unwrap();
            let drift = (rep.step.d_full_in - rep.step.d_full_out).abs();
            assert!(drift <= tol, "{name:?}/{mode:?}: drift {drift}");
            assert_eq!(rep.step.full_verdict, StepVerdict::PDivisibleStep);
        }
    }
}

#[test]
fn kraus_channel_from_file_shapes_rejects_bad_completeness() {
    // two half-identities do not complete
    let half = ComplexMatrix::identity(2).scale(c64(0.5, 0.0));
    assert!(KrausChannel::new(1, 1, vec![half.clone(), half]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn purity_stays_in_range(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let rho = random_density(n, &mut rng);
        let p = rho.purity();
        prop_assert!(p >= 2f64.powi(-(n as i32)) - 1e-12);
        prop_assert!(p <= 1.0 + 1e-9);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(3, &mut rng);
        let split = Bipartition::contiguous(2, 1).unwrap();
        let reduced = rho.partial_trace(&split, Subsystem::System).unwrap();
        let t0 = rho.mat().trace().unwrap();
        let t1 = reduced.mat().trace().unwrap();
        prop_assert!((t0 - t1).norm() < 1e-12);
    }

    #[test]
    fn pure_projectors_have_unit_purity(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: PureState = random_pure(2, &mut rng);
        prop_assert!((psi.to_density().purity() - 1.0).abs() < 1e-10);
    }
}
