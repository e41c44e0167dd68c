//! Constraint operators and physical states.
//!
//! Kick-free constraints `Σ s_i H_{C_i} + H_S` are handled structurally: clock
//! Hamiltonians are diagonal in the energy basis, so the kernel is spanned by
//! products of clock energy levels and system eigenvectors whose energies sum
//! to zero. Constraints with finite-width kicks go through a dense
//! eigendecomposition.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies sqrt, exp and friends without std; with std linked the
// inherent methods win and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;

use crate::clock::ClockModel;
use crate::tensor::{self, contract_factor, eigh, Eigh, Operator, SpaceLayout, StateVector, C64, ZERO};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ClockTerm {
    pub clock: ClockModel,
    /// +1 or −1; multiplies the clock's own (direction-scaled) Hamiltonian.
    pub sign: f64,
}

impl ClockTerm {
    pub fn new(clock: ClockModel) -> Self {
        Self { clock, sign: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KickProfile {
    /// f(t_k) on the clock grid, units of 1/time.
    Finite(Vec<f64>),
    /// f(t) = δ(t − τ̄); only usable through the propagator path.
    Instantaneous { tau_bar: f64, strength: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KickTerm {
    pub clock: String,
    pub profile: KickProfile,
    /// Hermitian generator on a subset of the system factors.
    pub generator: Operator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSpec {
    layout: SpaceLayout,
    clocks: Vec<ClockTerm>,
    system: Operator,
    kicks: Vec<KickTerm>,
}

impl ConstraintSpec {
    /// Layout is the clock factors in order, followed by the system factors.
    pub fn new(clocks: Vec<ClockTerm>, system: Operator) -> Result<Self> {
        if clocks.is_empty() {
            return Err(Error::InvalidArgument("a constraint needs at least one clock".into()));
        }
        let mut layout = SpaceLayout::default();
        for t in &clocks {
            if t.sign.abs() != 1.0 {
                return Err(Error::InvalidArgument(format!("clock sign {} is not ±1", t.sign)));
            }
            layout = layout.concat(&t.clock.layout())?;
        }
        let layout = layout.concat(system.layout())?;
        let system = system.into_hermitian()?;
        Ok(Self { layout, clocks, system, kicks: Vec::new() })
    }

    pub fn with_kick(mut self, kick: KickTerm) -> Result<Self> {
        let clock = self.clock(&kick.clock)?;
        if let KickProfile::Finite(f) = &kick.profile {
            if f.len() != clock.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "kick profile has {} samples for a clock of dimension {}",
                    f.len(),
                    clock.dim()
                )));
            }
        }
        for l in kick.generator.layout().labels() {
            if !self.system.layout().contains(l) {
                return Err(Error::UnknownFactor(l.to_string()));
            }
        }
        let generator = kick.generator.clone().into_hermitian()?;
        kick.generator.embed(self.system.layout())?;
        self.kicks.push(KickTerm { generator, ..kick });
        Ok(self)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn clocks(&self) -> &[ClockTerm] {
        &self.clocks
    }

    pub fn clock_models(&self) -> Vec<ClockModel> {
        self.clocks.iter().map(|t| t.clock.clone()).collect()
    }

    pub fn clock(&self, label: &str) -> Result<&ClockModel> {
        self.clocks
            .iter()
            .map(|t| &t.clock)
            .find(|c| c.label() == label)
            .ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn system(&self) -> &Operator {
        &self.system
    }

    pub fn kicks(&self) -> &[KickTerm] {
        &self.kicks
    }

    pub fn is_kick_free(&self) -> bool {
        self.kicks.is_empty()
    }

    /// Dimension of the product of all clock factors.
    pub fn clock_dim(&self) -> usize {
        self.clocks.iter().map(|t| t.clock.dim()).product()
    }
}

/// Dense Ĉ = Σ s_i H_{C_i} + H_S + Σ f(T)⊗K.
pub fn assemble(spec: &ConstraintSpec) -> Result<Operator> {
    let layout = spec.layout();
    let mut c = Operator::zeros(layout.clone());
    for t in &spec.clocks {
        c = c.add(&t.clock.hamiltonian().scale_real(t.sign).embed(layout)?)?;
    }
    c = c.add(&spec.system.embed(layout)?)?;
    for k in &spec.kicks {
        let f = match &k.profile {
            KickProfile::Finite(f) => f,
            KickProfile::Instantaneous { .. } => return Err(Error::RequiresPropagatorPath),
        };
        let clock = spec.clock(&k.clock)?;
        let d = clock.dim();
        let f_op = Operator::from_fn(clock.layout(), |i, j| {
            (0..d).map(|t| f[t] * clock.time_amp(t, i) * clock.time_amp(t, j).conj()).sum()
        })
        .symmetrized();
        let kick = tensor::kron(&f_op, &k.generator)?;
        c = c.add(&kick.embed(layout)?)?;
    }
    c.symmetrized().into_hermitian()
}

/// Projector onto eigenvectors of `c` with |eigenvalue| < tol (default 1e-9·‖C‖_max).
pub fn physical_projector(c: &Operator, tol: Option<f64>) -> Result<Operator> {
    let tol = tol.unwrap_or(1e-9 * c.norm_max());
    let e = eigh(c)?;
    let keep: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k].abs() < tol).collect();
    if keep.is_empty() {
        return Err(Error::NoPhysicalStates(tol));
    }
    let n = c.dim();
    let cols: Vec<Vec<C64>> = keep.iter().map(|&k| e.vector(k)).collect();
    let p = Operator::from_fn(c.layout().clone(), |i, j| cols.iter().map(|v| v[i] * v[j].conj()).sum());
    debug_assert_eq!(p.dim(), n);
    Ok(p.symmetrized())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    NullSpace,
    GroupAverage,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NullSpace => "null_space",
            Method::GroupAverage => "group_average",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Source {
    pub method: Method,
    pub seed: Option<StateVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalState {
    pub state: StateVector,
    /// Clock models for the clock factors in `state`'s layout.
    pub clocks: Vec<ClockModel>,
    pub source: Source,
}

impl PhysicalState {
    pub fn clock(&self, label: &str) -> Result<&ClockModel> {
        self.clocks.iter().find(|c| c.label() == label).ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.state.layout()
    }

    /// ⟨⟨Ψ|Ψ⟩⟩ in the kinematical inner product.
    pub fn norm_sqr(&self) -> f64 {
        self.state.norm().powi(2)
    }

    /// True when the state vanished, relative to the seed it was produced from.
    pub fn is_vanishing(&self) -> bool {
        let scale = self.source.seed.as_ref().map_or(1.0, |s| s.norm());
        self.state.norm() <= 1e-10 * scale
    }
}

/// Common base frequency of a real spectrum, or `None` when every value is zero.
///
/// Values within 1e-9·max(1, max|λ|) of zero count as zero. The base is an
/// approximate gcd; spectra needing more than 10⁶ multiples are rejected.
pub fn base_frequency(values: &[f64]) -> Result<Option<f64>> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale.max(1.0);
    let mut g: Option<f64> = None;
    for &v in values {
        let a = v.abs();
        if a <= tol {
            continue;
        }
        g = Some(match g {
            None => a,
            Some(g) => {
                let (mut x, mut y) = (g.max(a), g.min(a));
                while y > tol {
                    let r = x % y;
                    x = y;
                    y = if r > y - tol { 0.0 } else { r };
                }
                x
            }
        });
    }
    let Some(g) = g else { return Ok(None) };
    if scale / g > 1e6 {
        return Err(Error::NotCommensurate);
    }
    for &v in values {
        if (v - (v / g).round() * g).abs() > tol {
            return Err(Error::NotCommensurate);
        }
    }
    Ok(Some(g))
}

fn riemann_average(multiple: i64, n_steps: usize) -> C64 {
    let s: C64 =
        (0..n_steps).map(|k| C64::from_polar(1.0, -2.0 * PI * (k as f64) * multiple as f64 / n_steps as f64)).sum();
    s / n_steps as f64
}

fn averaging_weights(values: &[f64], n_steps: usize) -> Result<Vec<C64>> {
    let Some(g) = base_frequency(values)? else {
        return Ok(vec![C64::new(1.0, 0.0); values.len()]);
    };
    let multiples: Vec<i64> = values.iter().map(|v| (v / g).round() as i64).collect();
    let needed = multiples.iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0) + 1;
    if n_steps < needed {
        return Err(Error::TooFewSteps { needed, got: n_steps });
    }
    Ok(multiples.iter().map(|&m| riemann_average(m, n_steps)).collect())
}

/// (1/N) Σ_k e^{-i s_k C}|φ⟩ over one period of the flow generated by `c`.
pub fn group_average(c: &Operator, kin: &StateVector, n_steps: usize) -> Result<PhysicalState> {
    if kin.layout() != c.layout() {
        return Err(Error::DimensionMismatch("kinematical state layout".into()));
    }
    let e = eigh(c)?;
    let w = averaging_weights(&e.values, n_steps)?;
    let n = c.dim();
    let v = e.vectors.data();
    let coeffs: Vec<C64> =
        (0..n).map(|k| (0..n).map(|i| v[i * n + k].conj() * kin.amps()[i]).sum::<C64>() * w[k]).collect();
    let out: Vec<C64> = (0..n).map(|i| (0..n).map(|k| v[i * n + k] * coeffs[k]).sum()).collect();
    Ok(PhysicalState {
        state: StateVector::new(c.layout().clone(), out)?,
        clocks: Vec::new(),
        source: Source { method: Method::GroupAverage, seed: Some(kin.clone()) },
    })
}

/// Kernel of a kick-free constraint in product form.
#[derive(Clone, Debug)]
pub struct NullSpace {
    layout: SpaceLayout,
    clocks: Vec<ClockModel>,
    /// Σ s_i E_i for every clock multi-index (row-major over the clocks).
    clock_energy: Vec<f64>,
    system: Eigh,
    tol: f64,
    rank: usize,
}

impl NullSpace {
    pub fn new(spec: &ConstraintSpec) -> Result<Self> {
        Self::with_tol(spec, None)
    }

    pub fn with_tol(spec: &ConstraintSpec, tol: Option<f64>) -> Result<Self> {
        if let Some(k) = spec.kicks.first() {
            return Err(match k.profile {
                KickProfile::Instantaneous { .. } => Error::RequiresPropagatorPath,
                KickProfile::Finite(_) => Error::InvalidArgument("finite-width kicks need the dense projector".into()),
            });
        }
        let mut clock_energy = vec![0.0];
        for t in &spec.clocks {
            let e = t.clock.energies();
            clock_energy = clock_energy.iter().flat_map(|&a| e.iter().map(move |&b| a + t.sign * b)).collect();
        }
        let system = eigh(&spec.system)?;
        let bound =
            spec.clocks.iter().map(|t| t.clock.energies().iter().fold(0.0f64, |m, e| m.max(e.abs()))).sum::<f64>()
                + spec.system.norm_max();
        let tol = tol.unwrap_or(1e-9 * bound);
        let rank = clock_energy.iter().map(|&ec| system.values.iter().filter(|&&l| (ec + l).abs() < tol).count()).sum();
        if rank == 0 {
            return Err(Error::NoPhysicalStates(tol));
        }
        Ok(Self { layout: spec.layout.clone(), clocks: spec.clock_models(), clock_energy, system, tol, rank })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn clocks(&self) -> &[ClockModel] {
        &self.clocks
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn system_eigh(&self) -> &Eigh {
        &self.system
    }

    fn sys_dim(&self) -> usize {
        self.system.values.len()
    }

    /// Applies a weight per (clock index, system eigenvector) in the product basis.
    fn transform(&self, v: &[C64], weight: impl Fn(f64) -> C64) -> Vec<C64> {
        let m = self.sys_dim();
        let w = self.system.vectors.data();
        let mut out = vec![ZERO; v.len()];
        let mut y = vec![ZERO; m];
        for (ci, &ec) in self.clock_energy.iter().enumerate() {
            let block = &v[ci * m..(ci + 1) * m];
            if block.iter().all(|a| *a == ZERO) {
                continue;
            }
            for (j, yj) in y.iter_mut().enumerate() {
                let f = weight(ec + self.system.values[j]);
                *yj = if f == ZERO { ZERO } else { (0..m).map(|i| w[i * m + j].conj() * block[i]).sum::<C64>() * f };
            }
            let dst = &mut out[ci * m..(ci + 1) * m];
            for (i, d) in dst.iter_mut().enumerate() {
                *d = (0..m).map(|j| w[i * m + j] * y[j]).sum();
            }
        }
        out
    }

    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let tol = self.tol;
        self.transform(v, |e| if e.abs() < tol { C64::new(1.0, 0.0) } else { ZERO })
    }

    /// Ĉ|v⟩ computed in the product basis.
    pub fn apply_constraint(&self, v: &[C64]) -> Vec<C64> {
        self.transform(v, |e| C64::new(e, 0.0))
    }

    /// Discrete group average over one period of the constraint flow.
    pub fn group_average(&self, v: &[C64], n_steps: usize) -> Result<Vec<C64>> {
        let mut spectrum: Vec<f64> = Vec::new();
        for &ec in &self.clock_energy {
            for &l in &self.system.values {
                spectrum.push(ec + l);
            }
        }
        let g = base_frequency(&spectrum)?;
        let Some(g) = g else { return Ok(v.to_vec()) };
        let needed = spectrum.iter().map(|e| (e / g).round().abs() as usize).max().unwrap_or(0) + 1;
        if n_steps < needed {
            return Err(Error::TooFewSteps { needed, got: n_steps });
        }
        Ok(self.transform(v, |e| riemann_average((e / g).round() as i64, n_steps)))
    }

    /// Dense projector; only sensible for small layouts.
    pub fn projector(&self) -> Operator {
        let n = self.layout.dim();
        let mut cols = Vec::with_capacity(n);
        for a in 0..n {
            let mut e = vec![ZERO; n];
            e[a] = C64::new(1.0, 0.0);
            cols.push(self.project(&e));
        }
        Operator::from_fn(self.layout.clone(), |i, j| cols[j][i]).symmetrized()
    }

    pub fn physical_state(&self, kin: &StateVector, method: Method) -> Result<PhysicalState> {
        if kin.layout() != &self.layout {
            return Err(Error::DimensionMismatch("kinematical state layout".into()));
        }
        Ok(PhysicalState {
            state: StateVector::new(self.layout.clone(), self.project(kin.amps()))?,
            clocks: self.clocks.clone(),
            source: Source { method, seed: Some(kin.clone()) },
        })
    }
}

/// Projects `kin` onto the kernel of the constraint and rescales so the
/// conditional state at `normalize_at` (default: first clock, τ = 0) has unit norm.
pub fn kinematical_to_physical(
    spec: &ConstraintSpec,
    kin: &StateVector,
    normalize_at: Option<(&str, f64)>,
) -> Result<PhysicalState> {
    if kin.layout() != spec.layout() {
        return Err(Error::DimensionMismatch("kinematical state layout".into()));
    }
    let raw = if spec.is_kick_free() {
        NullSpace::new(spec)?.physical_state(kin, Method::NullSpace)?
    } else {
        let c = assemble(spec)?;
        let p = physical_projector(&c, None)?;
        PhysicalState {
            state: p.apply(kin)?,
            clocks: spec.clock_models(),
            source: Source { method: Method::NullSpace, seed: Some(kin.clone()) },
        }
    };
    normalize_conditional(raw, normalize_at)
}

/// Rescales a physical state so its conditional state at the given reading has unit norm.
pub fn normalize_conditional(mut psi: PhysicalState, at: Option<(&str, f64)>) -> Result<PhysicalState> {
    let (label, tau) = match at {
        Some((l, t)) => (l.to_string(), t),
        None => (
            psi.clocks
                .first()
                .ok_or_else(|| Error::InvalidArgument("physical state without clocks".into()))?
                .label()
                .to_string(),
            0.0,
        ),
    };
    let clock = psi.clock(&label)?;
    let k = clock.grid_index(tau)?;
    let (_, cond) = contract_factor(psi.layout(), psi.state.amps(), &label, &clock.time_state(k))?;
    let n = tensor::norm(&cond);
    if n <= 1e-12 * psi.state.norm() || n == 0.0 {
        return Err(Error::DegenerateNormalization { clock: label, tau });
    }
    psi.state = psi.state.scaled(C64::new(1.0 / n, 0.0));
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{build_clock, Direction};
    use crate::tensor::gates;

    #[test]
    fn base_frequency_gcd() {
        assert_eq!(base_frequency(&[0.0, 0.0]).unwrap(), None);
        let g = base_frequency(&[0.0, 2.0, 5.0, -3.0]).unwrap().unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert_eq!(base_frequency(&[1.0, 2f64.sqrt()]), Err(Error::NotCommensurate));
    }

    #[test]
    fn single_clock_rank() {
        let c = build_clock("C", 4, 1.0, Direction::Forward).unwrap();
        let spec = ConstraintSpec::new(vec![ClockTerm::new(c)], Operator::zeros(SpaceLayout::single("S", 3).unwrap()))
            .unwrap();
        assert_eq!(NullSpace::new(&spec).unwrap().rank(), 3);
    }

    #[test]
    fn offset_spectrum_has_no_kernel() {
        let c = build_clock("C", 4, 1.0, Direction::Forward).unwrap();
        let shift = 0.5 * c.omega();
        let sys = gates::identity("S", 2).scale_real(shift);
        let spec = ConstraintSpec::new(vec![ClockTerm::new(c)], sys).unwrap();
        assert!(matches!(NullSpace::new(&spec), Err(Error::NoPhysicalStates(_))));
        assert!(matches!(physical_projector(&assemble(&spec).unwrap(), None), Err(Error::NoPhysicalStates(_))));
    }

    #[test]
    fn instantaneous_kick_refuses_assembly() {
        let c = build_clock("C", 4, 1.0, Direction::Forward).unwrap();
        let spec = ConstraintSpec::new(vec![ClockTerm::new(c)], gates::pauli_x("S"))
            .unwrap()
            .with_kick(KickTerm {
                clock: "C".into(),
                profile: KickProfile::Instantaneous { tau_bar: 1.0, strength: 1.0 },
                generator: gates::pauli_z("S"),
            })
            .unwrap();
        assert_eq!(assemble(&spec), Err(Error::RequiresPropagatorPath));
        assert!(matches!(NullSpace::new(&spec), Err(Error::RequiresPropagatorPath)));
    }
}
