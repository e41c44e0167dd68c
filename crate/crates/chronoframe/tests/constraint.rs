mod common;

use chronoframe::causality::{sync_physical_norm, SyncProfile};
use chronoframe::clock::{build_clock, Direction};
use chronoframe::constraint::{
    assemble, group_average, kinematical_to_physical, physical_projector, ClockTerm, ConstraintSpec, NullSpace,
};
use chronoframe::tensor::{self, gates, Operator, SpaceLayout, StateVector};
use common::*;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

fn commensurate_spec(seed: u64, d: usize, clocks: usize) -> ConstraintSpec {
    let mut r = rng(seed);
    let dt = 2.0 * PI / d as f64;
    let terms = (1..=clocks)
        .map(|i| ClockTerm::new(build_clock(format!("C{i}"), d, dt, Direction::Forward).unwrap()))
        .collect::<Vec<_>>();
    let omega = terms[0].clock.omega();
    let sys = SpaceLayout::new([("A", 2), ("B", 2)]).unwrap();
    let v = random_unitary(&sys, &mut r);
    let diag: Vec<f64> = (0..4).map(|_| r.random_range(-2i32..=2) as f64 * omega).collect();
    let h = v
        .matmul(&Operator::diagonal(sys, &diag).unwrap())
        .unwrap()
        .matmul(&v.adjoint())
        .unwrap()
        .into_hermitian()
        .unwrap();
    ConstraintSpec::new(terms, h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projector_is_orthogonal(seed in any::<u64>()) {
        let spec = commensurate_spec(seed, 8, 1);
        let p = NullSpace::new(&spec).unwrap().projector();
        prop_assert!(p.matmul(&p).unwrap().sub(&p).unwrap().norm_max() < 1e-10);
        prop_assert!(p.hermiticity_defect() < 1e-10);
        let dense = physical_projector(&assemble(&spec).unwrap(), None).unwrap();
        prop_assert!(dense.sub(&p).unwrap().norm_max() < 1e-9);
    }

    #[test]
    fn physical_states_satisfy_constraint(seed in any::<u64>(), clocks in 1usize..3) {
        let spec = commensurate_spec(seed, 8, clocks);
        let mut r = rng(seed.wrapping_add(1));
        let kin = StateVector::new(spec.layout().clone(), random_state(spec.layout().dim(), &mut r)).unwrap();
        let ns = NullSpace::new(&spec).unwrap();
        let psi = ns.project(kin.amps());
        prop_assert!(tensor::norm(&ns.apply_constraint(&psi)) < 1e-8);
        let c = assemble(&spec).unwrap();
        prop_assert!(tensor::norm(&c.apply_slice(&psi)) < 1e-8);
    }

    #[test]
    fn group_average_matches_projection(seed in any::<u64>()) {
        let spec = commensurate_spec(seed, 8, 1);
        let mut r = rng(seed.wrapping_add(2));
        let v = random_state(spec.layout().dim(), &mut r);
        let ns = NullSpace::new(&spec).unwrap();
        let p = ns.project(&v);
        let fidelity = |a: &[chronoframe::C64], b: &[chronoframe::C64]| {
            tensor::inner(a, b).norm_sqr() / (tensor::norm(a).powi(2) * tensor::norm(b).powi(2))
        };
        let g = ns.group_average(&v, 64).unwrap();
        prop_assert!(fidelity(&p, &g) > 1.0 - 1e-8);
        let c = assemble(&spec).unwrap();
        let kin = StateVector::new(spec.layout().clone(), v).unwrap();
        let dense = group_average(&c, &kin, 64).unwrap();
        prop_assert!(fidelity(&p, dense.state.amps()) > 1.0 - 1e-8);
    }
}

#[test]
fn normalized_at_first_clock() {
    let spec = commensurate_spec(7, 8, 2);
    let c1 = spec.clock("C1").unwrap().clone();
    let c2 = spec.clock("C2").unwrap().clone();
    let rest: Vec<_> = c2
        .time_state(0)
        .iter()
        .flat_map(|a| {
            [*a, chronoframe::C64::new(0.0, 0.0), chronoframe::C64::new(0.0, 0.0), chronoframe::C64::new(0.0, 0.0)]
        })
        .collect();
    let kin = tensor::insert_factor(spec.layout(), "C1", &c1.time_state(0), &rest).unwrap();
    let psi = kinematical_to_physical(&spec, &StateVector::new(spec.layout().clone(), kin).unwrap(), None).unwrap();
    let cond = chronoframe::perspective::reduce(&psi, "C1", 0.0).unwrap();
    assert!((cond.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn too_few_steps_rejected() {
    let spec = commensurate_spec(3, 8, 1);
    let ns = NullSpace::new(&spec).unwrap();
    let v = vec![chronoframe::C64::new(1.0, 0.0); spec.layout().dim()];
    assert!(matches!(ns.group_average(&v, 2), Err(chronoframe::Error::TooFewSteps { .. })));
}

#[test]
fn synchronized_norm_grows_linearly() {
    let p = 2.0 * PI;
    let ratio = sync_physical_norm(32, p, SyncProfile::Kronecker).unwrap()
        / sync_physical_norm(16, p, SyncProfile::Kronecker).unwrap();
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn free_qubit_spec_accepts_zero_hamiltonian() {
    let c = build_clock("C", 4, 1.0, Direction::Forward).unwrap();
    let spec = ConstraintSpec::new(vec![ClockTerm::new(c)], gates::pauli_z("S").scale_real(0.0)).unwrap();
    assert_eq!(NullSpace::new(&spec).unwrap().rank(), 2);
}
