//! Instantaneous interventions compiled into piecewise propagators.
//!
//! A kick `δ(T − τ̄) ⊗ K` is never exponentiated as part of the constraint.
//! Instead the system evolves freely under `H_S` and the unitary `e^{-iK}` is
//! inserted when the kick's clock passes `τ̄`. With two clocks, the first reads
//! `s` and the second `s + t₂`, so a kick timed by the second clock fires at
//! `s = τ̄ − t₂`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::clock::ClockModel;
use crate::constraint::{ConstraintSpec, KickProfile};
use crate::perspective::ConditionalState;
use crate::tensor::{self, eigh, unitarity_defect, Eigh, Operator, SpaceLayout, StateVector, C64, ZERO};
use crate::{Error, Result};

/// A timed unitary on the system, optionally with the generator it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Kick {
    pub clock: String,
    pub tau_bar: f64,
    pub generator: Option<Operator>,
    pub unitary: Operator,
}

impl Kick {
    /// U = e^{-iK}.
    pub fn from_generator(clock: impl Into<String>, tau_bar: f64, k: Operator) -> Result<Self> {
        let k = k.into_hermitian()?;
        let unitary = tensor::expm_hermitian_generator(&k, 1.0)?;
        Ok(Self { clock: clock.into(), tau_bar, generator: Some(k), unitary })
    }

    pub fn from_unitary(clock: impl Into<String>, tau_bar: f64, u: Operator) -> Result<Self> {
        let defect = unitarity_defect(&u);
        if defect > 1e-11 {
            return Err(Error::InvalidSchedule(format!("kick is not unitary (defect {defect:e})")));
        }
        Ok(Self { clock: clock.into(), tau_bar, generator: None, unitary: u })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KickSchedule {
    system: SpaceLayout,
    entries: Vec<Kick>,
    /// Unitaries lifted to the full system layout.
    lifted: Vec<Operator>,
}

impl KickSchedule {
    /// Entries of each clock must be strictly increasing and non-negative.
    pub fn new(system: &SpaceLayout, entries: Vec<Kick>) -> Result<Self> {
        let mut lifted = Vec::with_capacity(entries.len());
        for (i, k) in entries.iter().enumerate() {
            if k.tau_bar.is_nan() || k.tau_bar < 0.0 {
                return Err(Error::InvalidSchedule(format!("kick time {} is negative", k.tau_bar)));
            }
            if let Some(prev) = entries[..i].iter().rev().find(|p| p.clock == k.clock) {
                if prev.tau_bar >= k.tau_bar {
                    return Err(Error::InvalidSchedule(format!(
                        "kicks on `{}` are not strictly increasing ({} then {})",
                        k.clock, prev.tau_bar, k.tau_bar
                    )));
                }
            }
            if unitarity_defect(&k.unitary) > 1e-11 {
                return Err(Error::InvalidSchedule("kick is not unitary".into()));
            }
            lifted.push(k.unitary.embed(system)?);
        }
        Ok(Self { system: system.clone(), entries, lifted })
    }

    pub fn empty(system: &SpaceLayout) -> Self {
        Self { system: system.clone(), entries: Vec::new(), lifted: Vec::new() }
    }

    pub fn entries(&self) -> &[Kick] {
        &self.entries
    }

    pub fn system(&self) -> &SpaceLayout {
        &self.system
    }

    fn on_clock<'a>(&'a self, clock: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.entries.iter().enumerate().filter(move |(_, k)| k.clock == clock).map(|(i, _)| i)
    }
}

/// How the two-clock propagator is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TwoClockForm {
    /// Free evolution for the elapsed reading of the first clock, with each kick
    /// inserted where it fires. This solves the kicked constraint exactly.
    #[default]
    Composed,
    /// The five-branch closed form with half-time shifts, taken literally.
    AsPrinted,
}

/// Which kicks have fired, and in which order, for one (s, t₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    None,
    AOnly,
    BOnly,
    AThenB,
    BThenA,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::None => "none",
            Branch::AOnly => "a_only",
            Branch::BOnly => "b_only",
            Branch::AThenB => "a_then_b",
            Branch::BThenA => "b_then_a",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Free(f64),
    Kick(usize),
}

/// Free evolution under `H_S` interleaved with scheduled kicks.
/// A kick at `τ̄` counts as applied for every `s ≥ τ̄`.
#[derive(Clone, Debug)]
pub struct PiecewisePropagator {
    eigh: Eigh,
    schedule: KickSchedule,
}

impl PiecewisePropagator {
    pub fn new(h_s: &Operator, schedule: KickSchedule) -> Result<Self> {
        if h_s.layout() != schedule.system() {
            return Err(Error::DimensionMismatch("system Hamiltonian and schedule layouts differ".into()));
        }
        Ok(Self { eigh: eigh(h_s)?, schedule })
    }

    pub fn schedule(&self) -> &KickSchedule {
        &self.schedule
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.schedule.system()
    }

    pub fn free(&self, t: f64) -> Operator {
        self.eigh.propagator(t)
    }

    /// e^{-itH} v.
    pub fn evolve_free(&self, t: f64, v: &[C64]) -> Vec<C64> {
        let n = v.len();
        let w = self.eigh.vectors.data();
        let y: Vec<C64> = (0..n)
            .map(|j| {
                let c: C64 = (0..n).map(|i| w[i * n + j].conj() * v[i]).sum();
                c * C64::from_polar(1.0, -t * self.eigh.values[j])
            })
            .collect();
        (0..n).map(|i| (0..n).map(|j| w[i * n + j] * y[j]).sum()).collect()
    }

    fn run(&self, steps: &[Step], v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        for s in steps {
            out = match *s {
                Step::Free(t) => {
                    if t == 0.0 {
                        out
                    } else {
                        self.evolve_free(t, &out)
                    }
                }
                Step::Kick(i) => self.schedule.lifted[i].apply_slice(&out),
            };
        }
        out
    }

    fn to_operator(&self, steps: &[Step]) -> Operator {
        let layout = self.layout().clone();
        let n = layout.dim();
        let mut cols = Vec::with_capacity(n);
        let mut e = vec![ZERO; n];
        for a in 0..n {
            e[a] = C64::new(1.0, 0.0);
            cols.push(self.run(steps, &e));
            e[a] = ZERO;
        }
        Operator::from_fn(layout, |i, j| cols[j][i])
    }

    /// Kick events (firing time, entry) at or before `s`, in firing order.
    fn composed(&self, s: f64, fire: impl Fn(&Kick) -> Option<f64>) -> (Vec<Step>, Vec<usize>) {
        let mut ev: Vec<(f64, usize)> = self
            .schedule
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, k)| fire(k).map(|t| (t, i)))
            .filter(|&(t, _)| t <= s)
            .collect();
        // Stable sort: simultaneous kicks keep schedule order.
        ev.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut steps = Vec::with_capacity(2 * ev.len() + 1);
        let mut now = 0.0;
        for &(t, i) in &ev {
            steps.push(Step::Free(t - now));
            steps.push(Step::Kick(i));
            now = t;
        }
        steps.push(Step::Free(s - now));
        (steps, ev.into_iter().map(|(_, i)| i).collect())
    }

    fn single_steps(&self, clock: &str, s: f64) -> Vec<Step> {
        self.composed(s, |k| (k.clock == clock).then_some(k.tau_bar)).0
    }

    /// System propagator at reading `s` of a single clock; kicks timed by other clocks are ignored.
    pub fn single_clock(&self, clock: &str, s: f64) -> Operator {
        self.to_operator(&self.single_steps(clock, s))
    }

    pub fn apply_single_clock(&self, clock: &str, s: f64, v: &[C64]) -> Vec<C64> {
        self.run(&self.single_steps(clock, s), v)
    }

    fn two_clock_steps(&self, c1: &str, c2: &str, s: f64, t2: f64, form: TwoClockForm) -> Result<(Vec<Step>, Branch)> {
        match form {
            TwoClockForm::Composed => {
                let (steps, fired) = self.composed(s, |k| {
                    if k.clock == c1 {
                        Some(k.tau_bar)
                    } else if k.clock == c2 {
                        Some(k.tau_bar - t2)
                    } else {
                        None
                    }
                });
                let on_a = |i: &usize| self.schedule.entries[*i].clock == c1;
                let branch = match (fired.iter().any(on_a), fired.iter().any(|i| !on_a(i))) {
                    (false, false) => Branch::None,
                    (true, false) => Branch::AOnly,
                    (false, true) => Branch::BOnly,
                    (true, true) if on_a(&fired[0]) => Branch::AThenB,
                    (true, true) => Branch::BThenA,
                };
                Ok((steps, branch))
            }
            TwoClockForm::AsPrinted => self.printed_steps(c1, c2, s, t2),
        }
    }

    fn printed_steps(&self, c1: &str, c2: &str, s: f64, t2: f64) -> Result<(Vec<Step>, Branch)> {
        let a: Vec<usize> = self.schedule.on_clock(c1).collect();
        let b: Vec<usize> = self.schedule.on_clock(c2).collect();
        if a.len() != 1 || b.len() != 1 || self.schedule.entries.len() != 2 {
            return Err(Error::InvalidSchedule("the printed two-clock form needs exactly one kick per clock".into()));
        }
        let (ia, ib) = (a[0], b[0]);
        let ta = self.schedule.entries[ia].tau_bar;
        let tb = self.schedule.entries[ib].tau_bar;
        let fb = tb - t2;
        let a_fired = s >= ta;
        let b_fired = s >= fb;
        use Step::{Free, Kick};
        // Steps listed in application order (rightmost factor first).
        Ok(match (a_fired, b_fired) {
            (false, false) => (vec![Free(s + t2 / 2.0)], Branch::None),
            (false, true) => (vec![Free(tb / 2.0), Kick(ib), Free(s + (t2 - tb) / 2.0)], Branch::BOnly),
            (true, false) => (vec![Free((ta + t2) / 2.0), Kick(ia), Free(s - ta / 2.0)], Branch::AOnly),
            // A tie goes to schedule order, A first.
            (true, true) if fb < ta => (
                vec![Free(tb / 2.0), Kick(ib), Free((ta + t2 - tb) / 2.0), Kick(ia), Free(s - ta / 2.0)],
                Branch::BThenA,
            ),
            (true, true) => (
                vec![Free((ta + t2) / 2.0), Kick(ia), Free((tb - t2 - ta) / 2.0), Kick(ib), Free(s + (t2 - tb) / 2.0)],
                Branch::AThenB,
            ),
        })
    }

    /// 𝒰(s, t₂) for kicks timed by `c1` (reading s) and `c2` (reading s + t₂).
    pub fn two_clock(&self, c1: &str, c2: &str, s: f64, t2: f64, form: TwoClockForm) -> Result<(Operator, Branch)> {
        let (steps, branch) = self.two_clock_steps(c1, c2, s, t2, form)?;
        Ok((self.to_operator(&steps), branch))
    }

    pub fn apply_two_clock(
        &self,
        c1: &str,
        c2: &str,
        s: f64,
        t2: f64,
        form: TwoClockForm,
        v: &[C64],
    ) -> Result<(Vec<C64>, Branch)> {
        let (steps, branch) = self.two_clock_steps(c1, c2, s, t2, form)?;
        Ok((self.run(&steps, v), branch))
    }
}

pub fn propagate_single_clock(h_s: &Operator, schedule: &KickSchedule, clock: &str, s: f64) -> Result<Operator> {
    Ok(PiecewisePropagator::new(h_s, schedule.clone())?.single_clock(clock, s))
}

/// Two-clock propagator for one kick timed by each clock.
pub fn propagate_two_clock(
    h_s: &Operator,
    kick_a: &Kick,
    kick_b: &Kick,
    s: f64,
    t2: f64,
    form: TwoClockForm,
) -> Result<(Operator, Branch)> {
    if kick_a.clock == kick_b.clock {
        return Err(Error::InvalidSchedule("kicks must be timed by different clocks".into()));
    }
    let schedule = KickSchedule::new(h_s.layout(), vec![kick_a.clone(), kick_b.clone()])?;
    PiecewisePropagator::new(h_s, schedule)?.two_clock(&kick_a.clock, &kick_b.clock, s, t2, form)
}

/// One t₂ sample of a conditional state.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    /// Signed inter-clock offset of this sample.
    pub t2: f64,
    /// Grid index of the other clock's reading.
    pub other_index: usize,
    pub amplitude: C64,
    pub branch: Branch,
    /// 𝒰 φ₀ for this sample.
    pub system: Vec<C64>,
}

/// Physical state generated from |t₀⟩_{C₁} ⊗ Σ_k φ_k|t_k⟩_{C₂} ⊗ |φ₀⟩ (or
/// |t₀⟩_C ⊗ |φ₀⟩ with one clock) under a constraint with instantaneous kicks.
#[derive(Clone, Debug)]
pub struct KickedScenario {
    clocks: Vec<ClockModel>,
    phi0: Vec<C64>,
    profile: Vec<C64>,
    propagator: PiecewisePropagator,
    form: TwoClockForm,
}

impl KickedScenario {
    /// `profile` is ignored (and may be empty) for a single clock.
    pub fn new(
        clocks: Vec<ClockModel>,
        h_s: &Operator,
        schedule: KickSchedule,
        phi0: Vec<C64>,
        profile: Vec<C64>,
        form: TwoClockForm,
    ) -> Result<Self> {
        if clocks.is_empty() || clocks.len() > 2 {
            return Err(Error::InvalidArgument("kicked scenarios need one or two clocks".into()));
        }
        for c in &clocks {
            if c.direction() != crate::clock::Direction::Forward {
                return Err(Error::InvalidArgument("kicked scenarios need forward clocks".into()));
            }
        }
        for k in schedule.entries() {
            if !clocks.iter().any(|c| c.label() == k.clock) {
                return Err(Error::UnknownFactor(k.clock.clone()));
            }
        }
        if phi0.len() != h_s.dim() {
            return Err(Error::DimensionMismatch("initial system state".into()));
        }
        let n = tensor::norm(&phi0);
        let phi0 = phi0.iter().map(|a| a / n).collect();
        let profile = if clocks.len() == 2 {
            if profile.len() != clocks[1].dim() {
                return Err(Error::DimensionMismatch("profile length".into()));
            }
            let n = tensor::norm(&profile);
            profile.iter().map(|a| a / n).collect()
        } else {
            Vec::new()
        };
        Ok(Self { clocks, phi0, profile, propagator: PiecewisePropagator::new(h_s, schedule)?, form })
    }

    /// Reads clocks, kicks and the seed state off a constraint and kinematical state.
    pub fn from_spec(spec: &ConstraintSpec, kin: &StateVector, form: TwoClockForm) -> Result<Self> {
        if kin.layout() != spec.layout() {
            return Err(Error::DimensionMismatch("kinematical state layout".into()));
        }
        if spec.clocks().iter().any(|t| t.sign != 1.0) {
            return Err(Error::InvalidArgument("kicked scenarios need clock signs +1".into()));
        }
        let clocks = spec.clock_models();
        let mut kicks = Vec::new();
        for k in spec.kicks() {
            match k.profile {
                KickProfile::Instantaneous { tau_bar, strength } => {
                    kicks.push(Kick::from_generator(k.clock.clone(), tau_bar, k.generator.scale_real(strength))?)
                }
                KickProfile::Finite(_) => {
                    return Err(Error::InvalidArgument(
                        "finite-width kicks are handled by the dense constraint path".into(),
                    ))
                }
            }
        }
        let sys = spec.system().layout().clone();
        let schedule = KickSchedule::new(&sys, kicks)?;
        let (phi0, profile) = seed_form(&clocks, kin)?;
        Self::new(clocks, spec.system(), schedule, phi0, profile, form)
    }

    pub fn clocks(&self) -> &[ClockModel] {
        &self.clocks
    }

    pub fn propagator(&self) -> &PiecewisePropagator {
        &self.propagator
    }

    pub fn phi0(&self) -> &[C64] {
        &self.phi0
    }

    pub fn profile(&self) -> &[C64] {
        &self.profile
    }

    fn clock_index(&self, label: &str) -> Result<usize> {
        self.clocks.iter().position(|c| c.label() == label).ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    /// Per-t₂ pieces of the conditional state relative to `clock` at reading `tau`.
    pub fn components(&self, clock: &str, tau: f64) -> Result<Vec<Component>> {
        let ci = self.clock_index(clock)?;
        let c = &self.clocks[ci];
        let k = c.grid_index(tau)?;
        let t = c.time(k);
        if self.clocks.len() == 1 {
            return Ok(vec![Component {
                t2: 0.0,
                other_index: 0,
                amplitude: C64::new(1.0, 0.0),
                branch: Branch::None,
                system: self.propagator.apply_single_clock(clock, t, &self.phi0),
            }]);
        }
        let (c1, c2) = (&self.clocks[0], &self.clocks[1]);
        let d2 = c2.dim() as i64;
        let mut out = Vec::new();
        for (j, &amp) in self.profile.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let t2 = c2.signed(c2.time(j));
            let steps = (t2 / c2.dt()).round() as i64;
            let (s, other) = if ci == 0 {
                (t, (k as i64 + steps).rem_euclid(d2) as usize)
            } else {
                (t - t2, (k as i64 - steps).rem_euclid(c1.dim() as i64) as usize)
            };
            let (system, branch) =
                self.propagator.apply_two_clock(c1.label(), c2.label(), s, t2, self.form, &self.phi0)?;
            out.push(Component { t2, other_index: other, amplitude: amp, branch, system });
        }
        Ok(out)
    }

    /// Normalized conditional state on (other clock, system) or on the system alone.
    pub fn conditional(&self, clock: &str, tau: f64) -> Result<ConditionalState> {
        let ci = self.clock_index(clock)?;
        let sys = self.propagator.layout().clone();
        let comps = self.components(clock, tau)?;
        let (layout, amps) = if self.clocks.len() == 1 {
            (sys, comps[0].system.clone())
        } else {
            let other = &self.clocks[1 - ci];
            let m = sys.dim();
            let d = other.dim();
            // Time-basis coefficients of the other clock, per system component.
            let mut coeff = vec![ZERO; d * m];
            for c in &comps {
                for (i, x) in c.system.iter().enumerate() {
                    coeff[c.other_index * m + i] += c.amplitude * x;
                }
            }
            let mut amps = vec![ZERO; d * m];
            let mut col = vec![ZERO; d];
            for i in 0..m {
                for (kk, x) in col.iter_mut().enumerate() {
                    *x = coeff[kk * m + i];
                }
                for (n, x) in other.from_time_basis(&col).into_iter().enumerate() {
                    amps[n * m + i] = x;
                }
            }
            (other.layout().concat(&sys)?, amps)
        };
        let state = StateVector::new(layout, amps)?;
        let state = state.normalized().map_err(|_| Error::DegenerateNormalization { clock: clock.to_string(), tau })?;
        Ok(ConditionalState { clock: clock.to_string(), tau, state })
    }
}

/// Splits a kinematical state into (φ₀, φ) if it has the supported seed form.
fn seed_form(clocks: &[ClockModel], kin: &StateVector) -> Result<(Vec<C64>, Vec<C64>)> {
    let unsupported = |why: &str| Error::UnsupportedKinematicalForm(why.to_string());
    let c1 = &clocks[0];
    let total = kin.norm();
    if total == 0.0 {
        return Err(unsupported("zero state"));
    }
    let (rest_layout, rest) = tensor::contract_factor(kin.layout(), kin.amps(), c1.label(), &c1.time_state(0))?;
    if (tensor::norm(&rest) - total).abs() > 1e-10 * total {
        return Err(unsupported("first clock is not in |t_0⟩"));
    }
    if clocks.len() == 1 {
        return Ok((rest, Vec::new()));
    }
    let c2 = &clocks[1];
    let d = c2.dim();
    let m = rest_layout.dim() / d;
    // rest is a d × m matrix over (C2 energy, system); it must have rank one.
    let best = (0..d)
        .max_by(|&a, &b| tensor::norm(&rest[a * m..(a + 1) * m]).total_cmp(&tensor::norm(&rest[b * m..(b + 1) * m])))
        .unwrap();
    let phi0: Vec<C64> = rest[best * m..(best + 1) * m].to_vec();
    let p2: f64 = phi0.iter().map(|a| a.norm_sqr()).sum();
    let chi: Vec<C64> = (0..d).map(|r| tensor::inner(&phi0, &rest[r * m..(r + 1) * m]) / p2).collect();
    let mut resid = 0.0;
    for r in 0..d {
        for i in 0..m {
            resid += (rest[r * m + i] - chi[r] * phi0[i]).norm_sqr();
        }
    }
    if resid.sqrt() > 1e-10 * total {
        return Err(unsupported("second clock and system are entangled"));
    }
    Ok((phi0, c2.to_time_basis(&chi)))
}

/// Condition-on-clock state for a constraint with instantaneous kicks.
pub fn conditional_with_kicks(
    spec: &ConstraintSpec,
    kin: &StateVector,
    clock: &str,
    tau: f64,
) -> Result<ConditionalState> {
    KickedScenario::from_spec(spec, kin, TwoClockForm::Composed)?.conditional(clock, tau)
}

/// Unit-mass Gaussian kick profile.
pub fn gaussian_kick(t: f64, tau_bar: f64, sigma: f64) -> f64 {
    let z = (t - tau_bar) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * core::f64::consts::PI).sqrt())
}

/// Propagator for `H_S + f(t)K` with a unit-mass Gaussian `f` of width `sigma`
/// centred on `tau_bar`, evaluated at `s`. The kick is integrated in the
/// interaction picture by a midpoint product over τ̄ ± 8σ.
pub fn finite_width_validator(
    h_s: &Operator,
    k: &Operator,
    tau_bar: f64,
    sigma: f64,
    dt: f64,
    s: f64,
) -> Result<Operator> {
    if sigma < 2.0 * dt {
        return Err(Error::UnresolvableWidth { sigma, dt });
    }
    let h = eigh(h_s)?;
    let kd = eigh(&k.clone().into_hermitian()?)?;
    let lo = tau_bar - 8.0 * sigma;
    let hi = s.min(tau_bar + 8.0 * sigma);
    let mut acc = Operator::identity(h_s.layout().clone());
    if hi > lo {
        let n = ((hi - lo) / (sigma / 64.0)).ceil().max(1.0) as usize;
        let step = (hi - lo) / n as f64;
        for j in 0..n {
            let t = lo + (j as f64 + 0.5) * step;
            let w = step * gaussian_kick(t, tau_bar, sigma);
            let inner = kd.propagator(w);
            // e^{itH} e^{-iwK} e^{-itH}
            let piece = h.propagator(-t).matmul(&inner)?.matmul(&h.propagator(t))?;
            acc = piece.matmul(&acc)?;
        }
    }
    h.propagator(s).matmul(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::gates;

    #[test]
    fn empty_schedule_is_free_evolution() {
        let h = gates::pauli_x("q");
        let p = propagate_single_clock(&h, &KickSchedule::empty(h.layout()), "C", 0.7).unwrap();
        let want = tensor::expm_hermitian_generator(&h, 0.7).unwrap();
        assert!(p.sub(&want).unwrap().norm_max() < 1e-14);
    }

    #[test]
    fn schedule_rejects_disorder() {
        let z = gates::pauli_z("q");
        let l = z.layout().clone();
        let ks =
            vec![Kick::from_unitary("C", 2.0, z.clone()).unwrap(), Kick::from_unitary("C", 1.0, z.clone()).unwrap()];
        assert!(matches!(KickSchedule::new(&l, ks), Err(Error::InvalidSchedule(_))));
        assert!(Kick::from_unitary("C", 1.0, z.scale_real(2.0)).is_err());
    }

    #[test]
    fn boundary_counts_as_applied() {
        let h = Operator::zeros(SpaceLayout::single("q", 2).unwrap());
        let x = gates::pauli_x("q");
        let schedule = KickSchedule::new(h.layout(), vec![Kick::from_unitary("C", 1.0, x.clone()).unwrap()]).unwrap();
        let p = PiecewisePropagator::new(&h, schedule).unwrap();
        assert_eq!(p.single_clock("C", 1.0).data(), x.data());
        assert_eq!(p.single_clock("C", 0.999).data(), Operator::identity(h.layout().clone()).data());
    }

    #[test]
    fn hand_computed_orders() {
        // X then Z on |0⟩ gives |1⟩·(−1); Z then X gives |1⟩.
        let h = Operator::zeros(SpaceLayout::single("q", 2).unwrap());
        let a = Kick::from_unitary("C1", 1.0, gates::pauli_x("q")).unwrap();
        let b = Kick::from_unitary("C2", 1.0, gates::pauli_z("q")).unwrap();
        let zero = [C64::new(1.0, 0.0), ZERO];
        for form in [TwoClockForm::Composed, TwoClockForm::AsPrinted] {
            let (u, br) = propagate_two_clock(&h, &a, &b, 2.0, -0.5, form).unwrap();
            assert_eq!(br, Branch::AThenB);
            let v = u.apply_slice(&zero);
            assert!((v[1] + C64::new(1.0, 0.0)).norm() < 1e-14);
            let (u, br) = propagate_two_clock(&h, &a, &b, 2.0, 0.5, form).unwrap();
            assert_eq!(br, Branch::BThenA);
            let v = u.apply_slice(&zero);
            assert!((v[1] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn validator_without_kick_is_free() {
        let h = gates::pauli_x("q");
        let k = Operator::zeros(h.layout().clone());
        let u = finite_width_validator(&h, &k, 1.0, 0.2, 0.1, 2.0).unwrap();
        let want = tensor::expm_hermitian_generator(&h, 2.0).unwrap();
        assert!(u.sub(&want).unwrap().norm_max() < 1e-12);
        assert!(matches!(finite_width_validator(&h, &k, 1.0, 0.1, 0.1, 2.0), Err(Error::UnresolvableWidth { .. })));
    }
}
