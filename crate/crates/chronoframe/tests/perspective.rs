mod common;

use chronoframe::clock::{build_clock, ClockModel, Direction};
use chronoframe::constraint::{kinematical_to_physical, ClockTerm, ConstraintSpec, NullSpace};
use chronoframe::perspective::{
    bulk_levels, coreduce_with, coupling_norm, frame_change, reduce, restrict_levels, schrodinger_residual,
    transform_observable, FrameMap,
};
use chronoframe::tensor::{self, gates, kron, Operator, SpaceLayout, StateVector};
use chronoframe::C64;
use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn clocks(d: usize) -> (ClockModel, ClockModel) {
    let dt = 2.0 * PI / d as f64;
    (build_clock("C1", d, dt, Direction::Forward).unwrap(), build_clock("C2", d, dt, Direction::Forward).unwrap())
}

/// V diag(n_k ω) V† with integers |n_k| ≤ 2.
fn commensurate(layout: &SpaceLayout, omega: f64, r: &mut rand_chacha::ChaCha8Rng) -> Operator {
    use rand::Rng;
    let v = random_unitary(layout, r);
    let diag: Vec<f64> = (0..layout.dim()).map(|_| r.random_range(-2i32..=2) as f64 * omega).collect();
    let d = Operator::diagonal(layout.clone(), &diag).unwrap();
    v.matmul(&d).unwrap().matmul(&v.adjoint()).unwrap().into_hermitian().unwrap()
}

struct Scenario {
    spec: ConstraintSpec,
    psi: chronoframe::constraint::PhysicalState,
}

fn random_scenario(seed: u64, qubits: usize) -> Scenario {
    let mut r = rng(seed);
    let (c1, c2) = clocks(16);
    let labels = ["A", "B"];
    let sys = SpaceLayout::new(labels[..qubits].iter().map(|l| (*l, 2))).unwrap();
    let h = commensurate(&sys, c1.omega(), &mut r);
    let spec = ConstraintSpec::new(vec![ClockTerm::new(c1.clone()), ClockTerm::new(c2)], h).unwrap();
    let chi = random_state(16, &mut r);
    let phi = random_state(sys.dim(), &mut r);
    let rest: Vec<C64> = chi.iter().flat_map(|a| phi.iter().map(move |b| a * b)).collect();
    let kin = tensor::insert_factor(spec.layout(), "C1", &c1.time_state(0), &rest).unwrap();
    let kin = StateVector::new(spec.layout().clone(), kin).unwrap();
    let psi = kinematical_to_physical(&spec, &kin, None).unwrap();
    Scenario { spec, psi }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn frame_change_preserves_probabilities(seed in any::<u64>(), qubits in 1usize..3, k1 in 0usize..16, k2 in 0usize..16) {
        let s = random_scenario(seed, qubits);
        let dt = 2.0 * PI / 16.0;
        let (t1, t2) = (k1 as f64 * dt, k2 as f64 * dt);
        let cond = reduce(&s.psi, "C1", t1).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let o = random_hermitian(cond.layout(), &mut r);
        let n1 = cond.norm().powi(2);
        let p1 = o.expectation(cond.amps(), cond.amps()).re / n1;
        let moved = frame_change(&cond, &s.spec, "C2", t2).unwrap();
        let o2 = transform_observable(&o, &s.spec, ("C1", t1), ("C2", t2)).unwrap();
        let p2 = o2.expectation(moved.state.amps(), moved.state.amps()).re;
        prop_assert!((p1 - p2).abs() < 1e-8, "{} vs {}", p1, p2);
    }

    #[test]
    fn conditional_norm_is_constant(seed in any::<u64>(), qubits in 1usize..3) {
        let s = random_scenario(seed, qubits);
        let dt = 2.0 * PI / 16.0;
        let n0 = reduce(&s.psi, "C1", 0.0).unwrap().norm();
        for k in 1..16 {
            let n = reduce(&s.psi, "C1", k as f64 * dt).unwrap().norm();
            prop_assert!((n - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn reduce_coreduce_round_trip(seed in any::<u64>(), k in 0usize..16) {
        let s = random_scenario(seed, 2);
        let ns = NullSpace::new(&s.spec).unwrap();
        let tau = k as f64 * 2.0 * PI / 16.0;
        let a = reduce(&s.psi, "C2", tau).unwrap();
        let back = coreduce_with(&ns, &reduce(&s.psi, "C1", 0.0).unwrap()).unwrap();
        let b = reduce(&back, "C2", tau).unwrap();
        let ov = tensor::inner(a.amps(), b.amps()).norm();
        let fid = ov * ov / (a.norm().powi(2) * b.norm().powi(2));
        prop_assert!(fid > 1.0 - 1e-8);
    }
}

#[test]
fn single_clock_conditional_is_schrodinger_evolution() {
    let c = build_clock("C", 16, 2.0 * PI / 16.0, Direction::Forward).unwrap();
    let h = gates::pauli_x("S");
    let spec = ConstraintSpec::new(vec![ClockTerm::new(c.clone())], h.clone()).unwrap();
    let phi0 = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
    let kin = tensor::insert_factor(spec.layout(), "C", &c.time_state(0), &phi0).unwrap();
    let psi = kinematical_to_physical(&spec, &StateVector::new(spec.layout().clone(), kin).unwrap(), None).unwrap();
    for k in 0..16 {
        let tau = c.time(k);
        let got = reduce(&psi, "C", tau).unwrap();
        let want = tensor::expm_hermitian_generator(&h, tau).unwrap().apply_slice(&phi0);
        assert!(max_diff(got.amps(), &want) < 1e-12);
    }
}

#[test]
fn residual_is_second_order() {
    let residual = |d: usize| {
        let c = build_clock("C", d, 2.0 * PI / d as f64, Direction::Forward).unwrap();
        let h = gates::pauli_x("S");
        let spec = ConstraintSpec::new(vec![ClockTerm::new(c.clone())], h.clone()).unwrap();
        let kin =
            tensor::insert_factor(spec.layout(), "C", &c.time_state(0), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
                .unwrap();
        let psi = kinematical_to_physical(&spec, &StateVector::new(spec.layout().clone(), kin).unwrap(), None).unwrap();
        schrodinger_residual(&psi, "C", &h).unwrap()
    };
    let ratio = residual(64) / residual(128);
    assert!((ratio - 4.0).abs() < 1.0, "{ratio}");
}

/// Generator of C2-conditioned evolution in C2's factorization, and the
/// one-step map read off the physical states, both restricted to the bulk of C1.
fn frame2_step(h_b: Operator, h_bc: Operator) -> (Operator, Operator, Operator) {
    let (c1, c2) = clocks(16);
    let w = c1.omega();
    let sys = SpaceLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
    let h = gates::pauli_z("A")
        .scale_real(w)
        .embed(&sys)
        .unwrap()
        .add(&h_b.embed(&sys).unwrap())
        .unwrap()
        .add(&h_bc.embed(&sys).unwrap())
        .unwrap()
        .into_hermitian()
        .unwrap();
    let spec = ConstraintSpec::new(vec![ClockTerm::new(c1.clone()), ClockTerm::new(c2)], h.clone()).unwrap();
    let ns = NullSpace::new(&spec).unwrap();
    let cond = spec.layout().without("C2").unwrap();
    let gen = c1.hamiltonian().embed(&cond).unwrap().add(&h.embed(&cond).unwrap()).unwrap().into_hermitian().unwrap();

    let step = FrameMap::new(&ns, ("C2", 0.0), ("C2", c1.dt())).unwrap();
    let n = cond.dim();
    let mut cols = Vec::new();
    for a in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[a] = C64::new(1.0, 0.0);
        cols.push(step.apply(&e));
    }
    let m = Operator::from_fn(cond.clone(), |i, j| cols[j][i] * step.scale);
    let levels = bulk_levels(&ns, &spec, "C1", "C2").unwrap();
    assert!(!levels.is_empty());
    let want = tensor::expm_hermitian_generator(&gen, c1.dt()).unwrap();
    (
        restrict_levels(&gen, "C1", &levels).unwrap(),
        restrict_levels(&m, "C1", &levels).unwrap(),
        restrict_levels(&want, "C1", &levels).unwrap(),
    )
}

#[test]
fn interaction_structure_survives_frame_change() {
    let w = clocks(16).0.omega();
    // Z_B and X_B X_C do not commute; 3Z_B + 4X_B X_C has spectrum ±5.
    let h_b = gates::pauli_z("B").scale_real(3.0 * w);
    let h_bc = kron(&gates::pauli_x("B"), &gates::pauli_x("C")).unwrap().scale_real(4.0 * w);
    let (gen, step, want) = frame2_step(h_b, h_bc);
    assert!(step.sub(&want).unwrap().norm_max() < 1e-8);
    assert!(coupling_norm(&gen, &["A"]).unwrap() < 1e-8);
    assert!(coupling_norm(&gen, &["C1"]).unwrap() < 1e-8);
    assert!(coupling_norm(&gen, &["B"]).unwrap() > 1.0);
}

#[test]
fn commuting_coupling_gives_equal_generators() {
    let w = clocks(16).0.omega();
    let h_b = gates::pauli_z("B").scale_real(w);
    let h_bc = kron(&gates::pauli_z("B"), &gates::pauli_z("C")).unwrap().scale_real(w);
    let (gen, step, want) = frame2_step(h_b, h_bc);
    assert!(step.sub(&want).unwrap().norm_max() < 1e-8);
    assert!(coupling_norm(&gen, &["A"]).unwrap() < 1e-8);
}
