use chronoframe::causality::*;
use chronoframe::clock::ProfileKind;
use chronoframe::tensor::{expm_hermitian_generator, gates, Operator, SpaceLayout};
use std::f64::consts::PI;

fn hadamard(label: &str) -> Operator {
    expm_hermitian_generator(&presets::hadamard_generator(label), 1.0).unwrap()
}

fn choices() -> Vec<InterventionChoice> {
    vec![
        InterventionChoice::none("none"),
        InterventionChoice::from_generator("hadamard", &presets::hadamard_generator("A")).unwrap(),
    ]
}

#[test]
fn interacting_pair_signals() {
    let sc = SignalingScenario::two_qubit(true, 16, PI / 4.0).unwrap();
    let m = MeasurementSpec::pauli_y("B");
    let r = compare_interventions(&sc, &choices(), &m, None).unwrap();
    eprintln!("{:?}", r.choices);
    assert!(r.checks.iter().all(|c| c.passed), "{:?}", r.checks);
    let none = &r.choices[0].distribution;
    let had = &r.choices[1].distribution;
    assert!((none.prob(1.0).unwrap() - 0.5).abs() < 1e-10);
    assert!(had.prob(1.0).unwrap() < 1e-10);
    assert_eq!(r.verdict, Verdict::Signaling);
}

#[test]
fn independent_pair_does_not_signal() {
    let sc = SignalingScenario::two_qubit(false, 16, PI / 4.0).unwrap();
    let r = compare_interventions(&sc, &choices(), &MeasurementSpec::pauli_y("B"), None).unwrap();
    assert!(r.max_tv_distance < 1e-12);
    assert!(r.max_trace_distance < 1e-12);
    assert_eq!(r.verdict, Verdict::NoSignaling);
}

#[test]
fn constraint_path_matches_born_rule() {
    let sc = SignalingScenario::two_qubit(true, 64, PI / 4.0).unwrap();
    let m = MeasurementSpec::pauli_y("B");
    for c in choices() {
        let a = constraint_path_distribution(&sc, &c, &m).unwrap();
        let b = born_rule_distribution(&sc, &c, &m).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }
}

#[test]
fn dilated_choice_adds_ancilla() {
    let sc = SignalingScenario::two_qubit(true, 16, 3.0 * PI / 8.0).unwrap();
    let u = expm_hermitian_generator(&presets::y_measurement_generator("A", "Ap"), 1.0).unwrap();
    let c = InterventionChoice::dilated("measure A", u).unwrap();
    let m = MeasurementSpec::pauli_y("B");
    let a = signaling_probability(&sc, &c, &m).unwrap();
    let b = born_rule_distribution(&sc, &c, &m).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
}

fn support(rows: &[(String, f64)], label: &str) -> f64 {
    rows.iter().find(|(l, _)| l == label).map(|r| r.1).unwrap_or(0.0)
}

#[test]
fn naive_embedding_supports() {
    let sys = presets::xx_coupling("A", "B");
    let rx = naive_embedding_demo(&NaiveSetup::two_qubit(sys.clone(), gates::pauli_x("A"))).unwrap();
    assert!(rx.checks.iter().all(|c| c.passed), "{:?}", rx.checks);
    assert!(support(&rx.frame2, "C1") < 1e-10);
    assert!(support(&rx.frame2, "B") < 1e-10);

    let rh = naive_embedding_demo(&NaiveSetup::two_qubit(sys, hadamard("A"))).unwrap();
    assert!(rh.checks.iter().all(|c| c.passed), "{:?}", rh.checks);
    assert!(support(&rh.frame1, "B") < 1e-10);
    assert!(support(&rh.frame2, "C1") > 1e-6);
    assert!(support(&rh.frame2, "B") > 1e-6);
}

#[test]
fn reversed_clocks_swap_composition() {
    let sigma = 4.0 * PI / 64.0;
    let xz = reversed_clock_ordering(&ReversedSetup::new(gates::pauli_x("S"), gates::pauli_z("S"), sigma)).unwrap();
    assert!(xz.distance_c1 < 1e-10);
    assert!((xz.distance - 0.037104).abs() < 1e-4, "{}", xz.distance);

    let sz = reversed_clock_ordering(&ReversedSetup::new(gates::phase_s("S"), gates::pauli_z("S"), sigma)).unwrap();
    assert!(sz.distance > 0.9);

    let id = ReversedSetup::new(gates::identity("S", 2), gates::identity("S", 2), sigma);
    assert!(reversed_clock_ordering(&id).unwrap().distance < 1e-10);
}

#[test]
fn sync_norm_grows_for_sharp_profiles() {
    let p = 2.0 * PI;
    let rows =
        sync_divergence_scan(&[16, 32], &[SyncProfile::Kronecker, SyncProfile::Gaussian { sigma: 0.8 }], p).unwrap();
    // Kronecker: (d − 1)/P.
    assert!((rows[0].norm - 15.0 / p).abs() < 1e-10);
    assert!((rows[2].norm - 31.0 / p).abs() < 1e-10);
    assert!((rows[1].norm - rows[3].norm).abs() < 1e-6);
    for d in [8, 16, 32] {
        assert!((single_clock_physical_norm(d, p).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn switch_superposes_orders() {
    let z = Operator::zeros(SpaceLayout::single("S", 2).unwrap());
    let r = quantum_switch_scenario(&SwitchSetup::qubit(z, gates::pauli_x("S"), gates::pauli_z("S"))).unwrap();
    assert!(r.checks.iter().all(|c| c.passed), "{:?}", r.checks);
    for f in &r.frames {
        assert_eq!(f.verdict, OrderVerdict::Indefinite);
        assert_eq!(f.windows[0].order, chronoframe::intervention::Branch::AThenB);
        assert_eq!(f.windows[1].order, chronoframe::intervention::Branch::BThenA);
        let ov = f.branch_overlap.unwrap();
        assert!((ov.re + 1.0).abs() < 1e-10 && ov.im.abs() < 1e-10);
        assert!((f.interference.unwrap() + 1.0).abs() < 1e-8);
    }
}

#[test]
fn switch_with_one_peak_is_definite() {
    let z = Operator::zeros(SpaceLayout::single("S", 2).unwrap());
    let mut s = SwitchSetup::qubit(z, gates::pauli_x("S"), gates::pauli_z("S"));
    s.profile = ProfileKind::Gaussian { center: 0.0, sigma: 0.5 };
    s.tau_a = 1.0;
    s.tau_b = 3.0;
    let r = quantum_switch_scenario(&s).unwrap();
    for f in &r.frames {
        assert_eq!(f.verdict, OrderVerdict::Definite(chronoframe::intervention::Branch::AThenB));
    }
    s.tau_a = 4.5;
    let r = quantum_switch_scenario(&s).unwrap();
    assert_eq!(r.frames[0].verdict, OrderVerdict::Definite(chronoframe::intervention::Branch::BThenA));
}

#[test]
fn two_frames_agree() {
    let s = TwoFrameSetup::two_qubit();
    let r = two_frame_causal_consistency(&s).unwrap();
    assert!(r.checks.iter().all(|c| c.passed), "{:?}", r.checks);
    assert_eq!(r.frames[0].delocalized.0, "B");
    assert_eq!(r.frames[1].delocalized.0, "A");
    let dev = r.frames[0].distribution.max_abs_diff(&r.single_clock);
    assert!(dev > 1e-4 && dev < 2e-2, "{dev}");

    let mut sharp = s.clone();
    sharp.profile = ProfileKind::Kronecker { center: 0.0 };
    let r = two_frame_causal_consistency(&sharp).unwrap();
    assert!(r.frames[0].distribution.max_abs_diff(&r.single_clock) < 1e-10);

    let mut swapped = s;
    std::mem::swap(&mut swapped.tau_a, &mut swapped.tau_b);
    let r = two_frame_causal_consistency(&swapped).unwrap();
    assert!(r.frames.iter().all(|f| f.order == chronoframe::intervention::Branch::BThenA));
}

#[test]
fn bimodal_profile_rejected_for_two_frames() {
    let mut s = TwoFrameSetup::two_qubit();
    s.profile = ProfileKind::Bimodal { center: 0.0, offset: 1.0, sigma: 0.1 };
    assert!(two_frame_causal_consistency(&s).is_err());
}
