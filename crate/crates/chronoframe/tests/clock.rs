use chronoframe::clock::{build_clock, build_profile, Direction, ProfileKind};
use chronoframe::tensor::{Operator, SpaceLayout};
use chronoframe::C64;
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Forward), Just(Direction::Reverse)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_states_are_complete(half in 1usize..17, dt in 0.01f64..2.0, dir in direction()) {
        let c = build_clock("C", 2 * half, dt, dir).unwrap();
        let d = c.dim();
        let sum = Operator::from_fn(c.layout(), |i, j| {
            (0..d).map(|k| c.time_amp(k, i) * c.time_amp(k, j).conj()).sum::<C64>()
        });
        prop_assert!(sum.sub(&Operator::identity(c.layout())).unwrap().norm_max() < 1e-12);
    }

    #[test]
    fn evolution_shifts_time_states(half in 1usize..17, dt in 0.01f64..2.0, dir in direction(), m in -40i64..40) {
        let c = build_clock("C", 2 * half, dt, dir).unwrap();
        prop_assert!(c.covariance_defect_steps(m) < 1e-11);
    }
}

#[test]
fn odd_dimension_rejected() {
    assert!(build_clock("C", 7, 0.1, Direction::Forward).is_err());
}

#[test]
fn kronecker_at_origin() {
    let c = build_clock("C", 16, 0.25, Direction::Forward).unwrap();
    let p = build_profile(&c, ProfileKind::Kronecker { center: 0.0 }).unwrap();
    assert_eq!(p.samples[0], C64::new(1.0, 0.0));
    assert!(p.samples[1..].iter().all(|a| a.norm() == 0.0));
}

#[test]
fn gaussian_is_normalized() {
    let dt = 0.1;
    let c = build_clock("C", 32, dt, Direction::Forward).unwrap();
    let p = build_profile(&c, ProfileKind::Gaussian { center: 0.0, sigma: 2.0 * dt }).unwrap();
    assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn bimodal_is_symmetric_with_two_peaks() {
    let dt = 0.1;
    let c = build_clock("C", 32, dt, Direction::Forward).unwrap();
    let p = build_profile(&c, ProfileKind::Bimodal { center: 0.0, offset: 4.0 * dt, sigma: dt }).unwrap();
    let d = c.dim();
    for k in 1..d {
        assert!((p.samples[k] - p.samples[d - k]).norm() < 1e-14);
    }
    let w: Vec<f64> = p.samples.iter().map(|a| a.norm_sqr()).collect();
    let peaks: Vec<usize> = (0..d).filter(|&k| w[k] > w[(k + 1) % d] && w[k] > w[(k + d - 1) % d]).collect();
    assert_eq!(peaks, vec![4, d - 4]);
}

#[test]
fn clock_layout_is_single_factor() {
    let c = build_clock("C", 8, 0.5, Direction::Reverse).unwrap();
    assert_eq!(c.layout(), SpaceLayout::single("C", 8).unwrap());
    assert!((c.period() - 4.0).abs() < 1e-15);
}
