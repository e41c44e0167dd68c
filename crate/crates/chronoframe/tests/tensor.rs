mod common;

use chronoframe::tensor::{
    eigh, expm_hermitian_generator, gates, kron, partial_trace, Operator, SpaceLayout, TraceMode,
};
use chronoframe::C64;
use common::*;
use proptest::prelude::*;

fn qubit(label: &str) -> SpaceLayout {
    SpaceLayout::single(label, 2).unwrap()
}

#[test]
fn zero_time_is_identity() {
    let h = gates::pauli_x("a");
    let u = expm_hermitian_generator(&h, 0.0).unwrap();
    assert!(u.sub(&Operator::identity(qubit("a"))).unwrap().norm_max() < 1e-15);
}

#[test]
fn xx_evolution_closed_form() {
    let xx = kron(&gates::pauli_x("A"), &gates::pauli_x("B")).unwrap().into_hermitian().unwrap();
    for t in [0.1, 0.5, 1.3, 3.0] {
        let u = expm_hermitian_generator(&xx, t).unwrap();
        let want = Operator::identity(xx.layout().clone())
            .scale_real(t.cos())
            .add(&xx.scale(C64::new(0.0, -t.sin())))
            .unwrap();
        assert!(u.sub(&want).unwrap().norm_max() < 1e-12);
    }
}

#[test]
fn frozen_qubit_propagator() {
    let h = Operator::from_rows(
        "q",
        &[&[C64::new(0.3, 0.0), C64::new(0.2, -0.1)], &[C64::new(0.2, 0.1), C64::new(-0.5, 0.0)]],
    )
    .unwrap()
    .into_hermitian()
    .unwrap();
    let u = expm_hermitian_generator(&h, 0.7).unwrap();
    let u00 = C64::new(0.9659154532999448, -0.20817358581382683);
    let u01 = C64::new(-0.059012228662892116, -0.14208677670358397);
    assert!((u.get(0, 0) - u00).norm() < 1e-13);
    assert!((u.get(0, 1) - u01).norm() < 1e-13);
}

fn taylor(h: &Operator, t: f64, terms: usize) -> Operator {
    let g = h.scale(C64::new(0.0, -t));
    let mut term = Operator::identity(h.layout().clone());
    let mut sum = term.clone();
    for k in 1..terms {
        term = term.matmul(&g).unwrap().scale_real(1.0 / k as f64);
        sum = sum.add(&term).unwrap();
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matches_taylor_series(seed in any::<u64>(), t in -1.0f64..1.0) {
        let mut r = rng(seed);
        let l = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        // Scale so the series converges quickly at 30 terms.
        let h = random_hermitian(&l, &mut r);
        let h = h.scale_real(1.0 / h.norm_max().max(1.0)).into_hermitian().unwrap();
        let u = expm_hermitian_generator(&h, t).unwrap();
        prop_assert!(u.sub(&taylor(&h, t, 30)).unwrap().norm_max() < 1e-11);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&qubit("a"), &mut r);
        let b = random_matrix(&SpaceLayout::single("b", 3).unwrap(), &mut r);
        let c = random_matrix(&qubit("c"), &mut r);
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.layout(), right.layout());
        prop_assert!(left.sub(&right).unwrap().norm_max() < 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = SpaceLayout::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let m = random_matrix(&l, &mut r);
        let rho = m.matmul(&m.adjoint()).unwrap();
        let rho = rho.scale_real(1.0 / rho.trace().re).into_hermitian().unwrap();
        for keep in [vec!["a"], vec!["b"], vec!["c", "a"], vec!["a", "b", "c"]] {
            let red = partial_trace(&rho, &keep, TraceMode::Density).unwrap();
            prop_assert!((red.trace() - rho.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), x in -2.0f64..2.0) {
        let mut r = rng(seed);
        let l = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        let p = random_matrix(&l, &mut r);
        let q = random_matrix(&l, &mut r);
        let lhs = partial_trace(&p.add(&q.scale_real(x)).unwrap(), &["b"], TraceMode::General).unwrap();
        let rhs = partial_trace(&p, &["b"], TraceMode::General)
            .unwrap()
            .add(&partial_trace(&q, &["b"], TraceMode::General).unwrap().scale_real(x))
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm_max() < 1e-12);
    }

    #[test]
    fn propagator_group_law(seed in any::<u64>(), s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let mut r = rng(seed);
        let l = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        let h = random_hermitian(&l, &mut r);
        let us = expm_hermitian_generator(&h, s).unwrap();
        let ut = expm_hermitian_generator(&h, t).unwrap();
        let ust = expm_hermitian_generator(&h, s + t).unwrap();
        prop_assert!(us.matmul(&ut).unwrap().sub(&ust).unwrap().norm_max() < 1e-10);
    }

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let l = SpaceLayout::single("x", n).unwrap();
        let a = random_hermitian(&l, &mut r);
        let e = eigh(&a).unwrap();
        prop_assert!(e.reconstruct().sub(&a).unwrap().norm_max() < 1e-10 * a.norm_max());
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
