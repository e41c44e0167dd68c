//! Finite cyclic clocks and delocalization profiles.
//!
//! A clock of dimension `d` and spacing `dt` has period `P = d·dt` and energies
//! `direction · n · 2π/P` for `n` in the symmetric window `-d/2 .. d/2`. The
//! energy basis is the clock's canonical basis; time states are its discrete
//! Fourier transform, so `e^{-iH dt}|t_k⟩ = |t_{k+direction}⟩` holds exactly.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies sqrt, exp and friends without std; with std linked the
// inherent methods win and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;

use crate::tensor::{Operator, SpaceLayout, C64, ZERO};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }

    pub fn step(self) -> isize {
        match self {
            Direction::Forward => 1,
            Direction::Reverse => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockModel {
    label: String,
    d: usize,
    dt: f64,
    direction: Direction,
}

/// Builds a clock and checks time-basis covariance.
pub fn build_clock(label: impl Into<String>, d: usize, dt: f64, direction: Direction) -> Result<ClockModel> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::InvalidDimension(d));
    }
    if dt.is_nan() || dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidSpacing(dt));
    }
    let c = ClockModel { label: label.into(), d, dt, direction };
    debug_assert!(c.covariance_defect() < 1e-11);
    Ok(c)
}

impl ClockModel {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn period(&self) -> f64 {
        self.d as f64 * self.dt
    }

    /// Base frequency 2π/P.
    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period()
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::single(self.label.clone(), self.d).expect("valid clock layout")
    }

    /// Signed window index of energy level `n`.
    pub fn window(&self, n: usize) -> i64 {
        n as i64 - (self.d / 2) as i64
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.direction.sign() * self.window(n) as f64 * self.omega()
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.d).map(|n| self.energy(n)).collect()
    }

    pub fn hamiltonian(&self) -> Operator {
        Operator::diagonal(self.layout(), &self.energies()).expect("diagonal matches layout")
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// ⟨n|t_k⟩ in the energy basis.
    pub fn time_amp(&self, k: usize, n: usize) -> C64 {
        let phase = -2.0 * PI * (self.window(n) * (k % self.d) as i64) as f64 / self.d as f64;
        C64::from_polar(1.0 / (self.d as f64).sqrt(), phase)
    }

    pub fn time_state(&self, k: usize) -> Vec<C64> {
        (0..self.d).map(|n| self.time_amp(k, n)).collect()
    }

    /// Components ⟨t_k|v⟩ of an energy-basis vector.
    pub fn to_time_basis(&self, v: &[C64]) -> Vec<C64> {
        (0..self.d).map(|k| (0..self.d).map(|n| self.time_amp(k, n).conj() * v[n]).sum()).collect()
    }

    /// Energy-basis vector Σ_k c_k |t_k⟩.
    pub fn from_time_basis(&self, c: &[C64]) -> Vec<C64> {
        (0..self.d).map(|n| (0..self.d).map(|k| self.time_amp(k, n) * c[k]).sum()).collect()
    }

    /// Grid index of a reading, wrapped into `0..d`. Readings more than
    /// 1e-9·dt away from a grid point are rejected.
    pub fn grid_index(&self, tau: f64) -> Result<usize> {
        let x = tau / self.dt;
        let k = x.round();
        if !x.is_finite() || (x - k).abs() > 1e-9 * k.abs().max(1.0) {
            return Err(Error::OffGridTime { clock: self.label.clone(), value: tau });
        }
        Ok((k as i64).rem_euclid(self.d as i64) as usize)
    }

    /// Representative of `t` in [−P/2, P/2).
    pub fn signed(&self, t: f64) -> f64 {
        let p = self.period();
        wrap(t + p / 2.0, p) - p / 2.0
    }

    /// T = Σ_k t_k |t_k⟩⟨t_k| in the energy basis.
    pub fn time_operator(&self) -> Operator {
        let d = self.d;
        let mut op = Operator::from_fn(self.layout(), |i, j| {
            (0..d).map(|k| self.time(k) * self.time_amp(k, i) * self.time_amp(k, j).conj()).sum()
        });
        op = op.symmetrized();
        op
    }

    /// Largest ‖e^{-iH m dt}|t_k⟩ − |t_{k+direction·m}⟩‖ over k, for m = 1.
    pub fn covariance_defect(&self) -> f64 {
        self.covariance_defect_steps(1)
    }

    pub fn covariance_defect_steps(&self, m: i64) -> f64 {
        let e = self.energies();
        let shift = self.direction.step() as i64 * m;
        (0..self.d)
            .map(|k| {
                let target = (k as i64 + shift).rem_euclid(self.d as i64) as usize;
                (0..self.d)
                    .map(|n| {
                        let u = C64::from_polar(1.0, -e[n] * m as f64 * self.dt);
                        (u * self.time_amp(k, n) - self.time_amp(target, n)).norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `x mod p` in [0, p).
pub fn wrap(x: f64, p: f64) -> f64 {
    let r = x % p;
    if r < 0.0 {
        r + p
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileKind {
    Kronecker {
        center: f64,
    },
    Gaussian {
        center: f64,
        sigma: f64,
    },
    /// Two equal Gaussian peaks at `center ± offset`.
    Bimodal {
        center: f64,
        offset: f64,
        sigma: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelocalizationProfile {
    pub kind: ProfileKind,
    /// Amplitudes on the clock grid, Σ|φ_k|² = 1.
    pub samples: Vec<C64>,
}

impl DelocalizationProfile {
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Width parameter, zero for the Kronecker profile.
    pub fn sigma(&self) -> f64 {
        match self.kind {
            ProfileKind::Kronecker { .. } => 0.0,
            ProfileKind::Gaussian { sigma, .. } | ProfileKind::Bimodal { sigma, .. } => sigma,
        }
    }
}

fn periodic_gaussian(clock: &ClockModel, center: f64, sigma: f64, k: usize) -> f64 {
    let p = clock.period();
    let t = clock.time(k);
    // Amplitude exp(−Δ²/4σ²) so that |φ|² has standard deviation σ.
    (-3..=3)
        .map(|m| {
            let delta = t - center + m as f64 * p;
            (-(delta * delta) / (4.0 * sigma * sigma)).exp()
        })
        .sum()
}

pub fn build_profile(clock: &ClockModel, kind: ProfileKind) -> Result<DelocalizationProfile> {
    let d = clock.dim();
    let raw: Vec<f64> = match kind {
        ProfileKind::Kronecker { center } => {
            let k0 = clock.grid_index(center)?;
            (0..d).map(|k| if k == k0 { 1.0 } else { 0.0 }).collect()
        }
        ProfileKind::Gaussian { center, sigma } => {
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Error::InvalidWidth(sigma));
            }
            (0..d).map(|k| periodic_gaussian(clock, center, sigma, k)).collect()
        }
        ProfileKind::Bimodal { center, offset, sigma } => {
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Error::InvalidWidth(sigma));
            }
            (0..d)
                .map(|k| {
                    periodic_gaussian(clock, center - offset, sigma, k)
                        + periodic_gaussian(clock, center + offset, sigma, k)
                })
                .collect()
        }
    };
    let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let samples = raw.iter().map(|x| C64::new(x / n, 0.0)).collect();
    Ok(DelocalizationProfile { kind, samples })
}

/// Σ_k φ_k |t_k⟩ in the clock's energy basis.
pub fn profile_state(clock: &ClockModel, profile: &DelocalizationProfile) -> Vec<C64> {
    let mut c = profile.samples.clone();
    c.resize(clock.dim(), ZERO);
    clock.from_time_basis(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_clock() {
        let c = build_clock("c", 2, 1.0, Direction::Forward).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        // Window {-1, 0}: |t_0⟩ = (|0⟩+|1⟩)/√2, |t_1⟩ = (−|0⟩+|1⟩)/√2 up to the
        // ordering of the energy levels.
        let t0 = c.time_state(0);
        assert!((t0[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((t0[1] - C64::new(h, 0.0)).norm() < 1e-15);
        let t1 = c.time_state(1);
        assert!((t1[0] + C64::new(h, 0.0)).norm() < 1e-15);
        assert!((t1[1] - C64::new(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(build_clock("c", 1, 1.0, Direction::Forward), Err(Error::InvalidDimension(1)));
        assert_eq!(build_clock("c", 7, 1.0, Direction::Forward), Err(Error::InvalidDimension(7)));
        assert!(build_clock("c", 4, 0.0, Direction::Forward).is_err());
    }

    #[test]
    fn covariance_both_directions() {
        for dir in [Direction::Forward, Direction::Reverse] {
            let c = build_clock("c", 16, 0.1, dir).unwrap();
            assert!(c.covariance_defect() < 1e-12);
            for m in [-5, 3, 17] {
                assert!(c.covariance_defect_steps(m) < 1e-11);
            }
        }
    }

    #[test]
    fn dft_roundtrip() {
        let c = build_clock("c", 8, 0.3, Direction::Forward).unwrap();
        let v: Vec<C64> = (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let back = c.from_time_basis(&c.to_time_basis(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_index_wraps_and_rejects() {
        let c = build_clock("c", 8, 0.25, Direction::Forward).unwrap();
        assert_eq!(c.grid_index(0.75).unwrap(), 3);
        assert_eq!(c.grid_index(-0.25).unwrap(), 7);
        assert!(matches!(c.grid_index(0.3), Err(Error::OffGridTime { .. })));
    }

    #[test]
    fn kronecker_profile() {
        let c = build_clock("c", 8, 1.0, Direction::Forward).unwrap();
        let p = build_profile(&c, ProfileKind::Kronecker { center: 0.0 }).unwrap();
        assert_eq!(p.samples[0], C64::new(1.0, 0.0));
        assert!(p.samples[1..].iter().all(|a| *a == ZERO));
        assert_eq!(build_profile(&c, ProfileKind::Gaussian { center: 0.0, sigma: 0.0 }), Err(Error::InvalidWidth(0.0)));
    }
}
