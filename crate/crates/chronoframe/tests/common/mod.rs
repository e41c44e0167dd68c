#![allow(dead_code)]

use chronoframe::tensor::{Operator, SpaceLayout};
use chronoframe::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

pub fn random_matrix(layout: &SpaceLayout, r: &mut ChaCha8Rng) -> Operator {
    let n = layout.dim();
    let data = (0..n * n).map(|_| C64::new(gauss(r), gauss(r))).collect();
    Operator::new(layout.clone(), data, false).unwrap()
}

pub fn random_hermitian(layout: &SpaceLayout, r: &mut ChaCha8Rng) -> Operator {
    let a = random_matrix(layout, r);
    a.add(&a.adjoint()).unwrap().scale_real(0.5).into_hermitian().unwrap()
}

pub fn random_state(n: usize, r: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(gauss(r), gauss(r))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// e^{-iH} for a random Hermitian H.
pub fn random_unitary(layout: &SpaceLayout, r: &mut ChaCha8Rng) -> Operator {
    let h = random_hermitian(layout, r);
    chronoframe::tensor::expm_hermitian_generator(&h, 1.0).unwrap()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
