//! Operational causality experiments: signaling tests, frame-dependent
//! embeddings of interventions, opposite-running clocks, the synchronization
//! norm scan, the clock-controlled switch and two-frame order consistency.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::clock::{build_clock, build_profile, profile_state, ClockModel, Direction, ProfileKind};
use crate::constraint::{kinematical_to_physical, ClockTerm, ConstraintSpec, NullSpace};
use crate::intervention::{Branch, Component, Kick, KickSchedule, KickedScenario, TwoClockForm};
use crate::perspective::{
    bulk_levels, coreduce_with, reduce, reduced_subsystem_state, restrict_levels, support_norms, FrameMap,
};
use crate::tensor::{
    self, contract_factor, eigh, expm_hermitian_generator, gates, reduced_density, unitarity_defect, Operator,
    SpaceLayout, StateVector, C64, ONE, ZERO,
};
use crate::{Error, Result};

/// Total-variation distance above which two interventions count as signaling.
pub const SIGNALING_THRESHOLD: f64 = 1e-6;

/// Weight above which a causal order counts as present. This is a convention
/// of this crate, not a physical constant.
pub const ORDER_THRESHOLD: f64 = 0.4;

/// An invariant evaluated during an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, passed: value >= limit }
    }
}

/// Outcome probabilities, in the order of the measurement's outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub outcomes: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Distribution {
    fn clamped(outcomes: Vec<f64>, probs: Vec<f64>) -> Self {
        Self { outcomes, probs: probs.into_iter().map(|p| p.max(0.0)).collect() }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob(&self, outcome: f64) -> Option<f64> {
        self.outcomes.iter().position(|&b| b == outcome).map(|i| self.probs[i])
    }

    /// ½ Σ_b |p_b − q_b|; outcomes must match.
    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(p, q)| (p - q).abs()).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs.iter().zip(&other.probs).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
    }
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &Operator, sigma: &Operator) -> Result<f64> {
    let diff = rho.sub(sigma)?.symmetrized();
    Ok(0.5 * eigh(&diff)?.values.iter().map(|l| l.abs()).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq)]
pub enum InterventionKind {
    None,
    /// Unitary on system factors.
    Unitary(Operator),
    /// Unitary on system factors plus ancillas; ancilla factors unknown to the
    /// system are added in |0⟩.
    Dilated(Operator),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterventionChoice {
    pub label: String,
    pub kind: InterventionKind,
}

impl InterventionChoice {
    pub fn none(label: impl Into<String>) -> Self {
        Self { label: label.into(), kind: InterventionKind::None }
    }

    pub fn unitary(label: impl Into<String>, u: Operator) -> Result<Self> {
        check_unitary(&u)?;
        Ok(Self { label: label.into(), kind: InterventionKind::Unitary(u) })
    }

    pub fn dilated(label: impl Into<String>, u: Operator) -> Result<Self> {
        check_unitary(&u)?;
        Ok(Self { label: label.into(), kind: InterventionKind::Dilated(u) })
    }

    /// Unitary e^{-iK}.
    pub fn from_generator(label: impl Into<String>, k: &Operator) -> Result<Self> {
        Self::unitary(label, expm_hermitian_generator(&k.clone().into_hermitian()?, 1.0)?)
    }

    pub fn operator(&self) -> Option<&Operator> {
        match &self.kind {
            InterventionKind::None => None,
            InterventionKind::Unitary(u) | InterventionKind::Dilated(u) => Some(u),
        }
    }
}

fn check_unitary(u: &Operator) -> Result<()> {
    let d = unitarity_defect(u);
    if d > 1e-11 {
        return Err(Error::InvalidArgument(format!("operation is not unitary (defect {d:e})")));
    }
    Ok(())
}

/// Projective measurement O = Σ_b b Π^b.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSpec {
    outcomes: Vec<f64>,
    projectors: Vec<Operator>,
}

impl MeasurementSpec {
    pub fn new(outcomes: Vec<(f64, Operator)>) -> Result<Self> {
        let Some(first) = outcomes.first() else {
            return Err(Error::InvalidArgument("a measurement needs outcomes".into()));
        };
        let layout = first.1.layout().clone();
        let mut sum = Operator::zeros(layout.clone());
        for (b, p) in &outcomes {
            if p.layout() != &layout {
                return Err(Error::DimensionMismatch("projectors act on different factors".into()));
            }
            let herm = p.hermiticity_defect();
            let idem = p.matmul(p)?.sub(p)?.norm_max();
            if herm > 1e-12 || idem > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "projector for outcome {b} is not an orthogonal projector"
                )));
            }
            sum = sum.add(p)?;
        }
        let defect = sum.sub(&Operator::identity(layout))?.norm_max();
        if defect > 1e-12 {
            return Err(Error::InvalidArgument(format!("projectors do not sum to the identity ({defect:e})")));
        }
        let (outcomes, projectors) = outcomes.into_iter().map(|(b, p)| (b, p.symmetrized())).unzip();
        Ok(Self { outcomes, projectors })
    }

    /// Outcomes +1 and −1 for |±y⟩.
    pub fn pauli_y(label: &str) -> Self {
        Self::new(vec![
            (1.0, gates::projector(label, &gates::plus_y())),
            (-1.0, gates::projector(label, &gates::minus_y())),
        ])
        .expect("Y-basis projectors are complete")
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.projectors[0].layout()
    }

    pub fn observable(&self) -> Operator {
        self.outcomes
            .iter()
            .zip(&self.projectors)
            .fold(Operator::zeros(self.layout().clone()), |acc, (b, p)| acc.add(&p.scale_real(*b)).unwrap())
    }

    /// Born rule on a normalized density operator over `layout()`.
    pub fn probabilities(&self, rho: &Operator) -> Result<Distribution> {
        if rho.layout() != self.layout() {
            return Err(Error::DimensionMismatch("density operator layout".into()));
        }
        let probs = self.projectors.iter().map(|p| Ok(p.matmul(rho)?.trace().re)).collect::<Result<Vec<_>>>()?;
        Ok(Distribution::clamped(self.outcomes.clone(), probs))
    }

    /// Von Neumann coupling Σ_b Π^b ⊗ S^b, with S the cyclic shift on an
    /// ancilla of one level per outcome. Starting the ancilla in |0⟩, the
    /// readout |b⟩⟨b| on the ancilla reproduces the Born rule.
    pub fn dilation(&self, ancilla: &str) -> Result<Operator> {
        let m = self.outcomes.len();
        let anc = SpaceLayout::single(ancilla, m)?;
        let mut u: Option<Operator> = None;
        for (b, p) in self.projectors.iter().enumerate() {
            let shift = Operator::from_fn(anc.clone(), |i, j| if i == (j + b) % m { ONE } else { ZERO });
            let term = tensor::kron(p, &shift)?;
            u = Some(match u {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        Ok(u.expect("at least one outcome"))
    }

    fn readout(&self, ancilla: &str, rho: &Operator) -> Result<Distribution> {
        let m = self.outcomes.len();
        if rho.layout() != &SpaceLayout::single(ancilla, m)? {
            return Err(Error::DimensionMismatch("ancilla density layout".into()));
        }
        Ok(Distribution::clamped(self.outcomes.clone(), (0..m).map(|b| rho.get(b, b).re).collect()))
    }

    fn labels(&self) -> Vec<&str> {
        self.layout().labels().collect()
    }
}

/// Generators used by the scenarios and presets.
pub mod presets {
    use super::*;

    /// K with e^{-iK} = −i·H (Hadamard up to a global phase).
    pub fn hadamard_generator(label: &str) -> Operator {
        gates::pauli_x(label)
            .add(&gates::pauli_z(label))
            .unwrap()
            .scale_real(PI / (2.0 * 2f64.sqrt()))
            .into_hermitian()
            .unwrap()
    }

    /// K = (π/2)(1 − P), so e^{-iK} = P for a Pauli P.
    pub fn pauli_generator(p: &Operator) -> Operator {
        Operator::identity(p.layout().clone()).sub(p).unwrap().scale_real(PI / 2.0).into_hermitian().unwrap()
    }

    /// K = π Π₋ ⊗ |−⟩⟨−|: flips the ancilla from |0⟩ to |1⟩ on the −y outcome.
    /// e^{-iK} equals the dilation of [`MeasurementSpec::pauli_y`].
    pub fn y_measurement_generator(target: &str, ancilla: &str) -> Operator {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
        tensor::kron(&gates::projector(target, &gates::minus_y()), &gates::projector(ancilla, &minus))
            .unwrap()
            .scale_real(PI)
            .into_hermitian()
            .unwrap()
    }

    /// X ⊗ X.
    pub fn xx_coupling(a: &str, b: &str) -> Operator {
        tensor::kron(&gates::pauli_x(a), &gates::pauli_x(b)).unwrap().into_hermitian().unwrap()
    }

    /// X ⊗ 1 + 1 ⊗ X.
    pub fn independent_x(a: &str, b: &str) -> Operator {
        let layout = SpaceLayout::new([(a, 2), (b, 2)]).unwrap();
        gates::pauli_x(a)
            .embed(&layout)
            .unwrap()
            .add(&gates::pauli_x(b).embed(&layout).unwrap())
            .unwrap()
            .into_hermitian()
            .unwrap()
    }

    /// |0…0⟩ on a layout.
    pub fn ground(layout: &SpaceLayout) -> Vec<C64> {
        let mut v = vec![ZERO; layout.dim()];
        v[0] = ONE;
        v
    }
}

/// A single clock timing an intervention at `t_i` and a measurement at `t_f`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalingScenario {
    pub clock: ClockModel,
    pub system: Operator,
    pub initial: Vec<C64>,
    pub t_i: f64,
    pub t_f: f64,
    /// Reading at which the measurement record is inspected; defaults to `t_f + dt`.
    pub readout: Option<f64>,
}

impl SignalingScenario {
    /// Two qubits `A`, `B` in |00⟩ under X⊗X (interacting) or X⊗1 + 1⊗X,
    /// with a clock of period 2π and the intervention at 0.
    pub fn two_qubit(interacting: bool, d: usize, t_f: f64) -> Result<Self> {
        let clock = build_clock("C", d, 2.0 * PI / d as f64, Direction::Forward)?;
        let system = if interacting { presets::xx_coupling("A", "B") } else { presets::independent_x("A", "B") };
        let initial = presets::ground(system.layout());
        Ok(Self { clock, system, initial, t_i: 0.0, t_f, readout: None })
    }

    fn readout_time(&self) -> Result<f64> {
        let r = self.readout.unwrap_or(self.t_f + self.clock.dt());
        if r <= self.t_f {
            return Err(Error::BadReadoutTime { readout: r, measurement: self.t_f });
        }
        Ok(r)
    }

    /// System Hamiltonian and initial state with the choice's ancillas appended in |0⟩.
    fn extended(&self, choice: &InterventionChoice) -> Result<(Operator, Vec<C64>)> {
        if self.initial.len() != self.system.dim() {
            return Err(Error::DimensionMismatch("initial state".into()));
        }
        let mut layout = self.system.layout().clone();
        let mut amps = self.initial.clone();
        if let InterventionKind::Dilated(u) = &choice.kind {
            for f in u.layout().factors() {
                if !layout.contains(&f.label) {
                    (layout, amps) = append_ground(&layout, &amps, &f.label, f.dim)?;
                }
            }
        }
        Ok((self.system.embed(&layout)?, amps))
    }
}

fn append_ground(layout: &SpaceLayout, amps: &[C64], label: &str, dim: usize) -> Result<(SpaceLayout, Vec<C64>)> {
    let out = layout.concat(&SpaceLayout::single(label, dim)?)?;
    let mut v = vec![ZERO; out.dim()];
    for (i, a) in amps.iter().enumerate() {
        v[i * dim] = *a;
    }
    Ok((out, v))
}

fn measured_density(layout: &SpaceLayout, psi: &[C64], m: &MeasurementSpec) -> Result<Operator> {
    let labels = m.labels();
    let rho = reduced_density(layout, psi, &labels)?;
    if rho.layout() != m.layout() {
        return Err(Error::DimensionMismatch("measurement factors must follow the system order".into()));
    }
    let n = rho.trace().re;
    Ok(rho.scale_real(1.0 / n))
}

/// Born rule on the measured factors at `t_f`, with the intervention applied at `t_i`.
pub fn born_rule_distribution(
    sc: &SignalingScenario,
    choice: &InterventionChoice,
    m: &MeasurementSpec,
) -> Result<Distribution> {
    let (h, phi) = sc.extended(choice)?;
    let layout = h.layout().clone();
    let e = eigh(&h)?;
    let mut psi = e.propagator(sc.t_i).apply_slice(&phi);
    if let Some(u) = choice.operator() {
        psi = u.apply_embedded(&layout, &psi)?;
    }
    psi = e.propagator(sc.t_f - sc.t_i).apply_slice(&psi);
    m.probabilities(&measured_density(&layout, &psi, m)?)
}

/// Reduced state of the measured factors at `t_f`.
pub fn measured_state(sc: &SignalingScenario, choice: &InterventionChoice, m: &MeasurementSpec) -> Result<Operator> {
    let (h, phi) = sc.extended(choice)?;
    let layout = h.layout().clone();
    let e = eigh(&h)?;
    let mut psi = e.propagator(sc.t_i).apply_slice(&phi);
    if let Some(u) = choice.operator() {
        psi = u.apply_embedded(&layout, &psi)?;
    }
    psi = e.propagator(sc.t_f - sc.t_i).apply_slice(&psi);
    measured_density(&layout, &psi, m)
}

/// Outcome distribution read off a measurement ancilla after a von Neumann
/// coupling at `t_f`, with both operations compiled into the kicked propagator.
pub fn signaling_probability(
    sc: &SignalingScenario,
    choice: &InterventionChoice,
    m: &MeasurementSpec,
) -> Result<Distribution> {
    let readout = sc.readout_time()?;
    let (h, phi) = sc.extended(choice)?;
    let ancilla = format!("{}p", m.labels().join(""));
    let (layout, phi) = append_ground(h.layout(), &phi, &ancilla, m.outcomes.len())?;
    let h = h.embed(&layout)?;
    let clock = sc.clock.label();
    let mut kicks = Vec::new();
    if let Some(u) = choice.operator() {
        kicks.push(Kick::from_unitary(clock, sc.t_i, u.clone())?);
    }
    kicks.push(Kick::from_unitary(clock, sc.t_f, m.dilation(&ancilla)?)?);
    let schedule = KickSchedule::new(&layout, kicks)?;
    let scenario = KickedScenario::new(vec![sc.clock.clone()], &h, schedule, phi, Vec::new(), TwoClockForm::Composed)?;
    let cond = scenario.conditional(clock, readout)?;
    m.readout(&ancilla, &reduced_subsystem_state(&cond, &[&ancilla])?)
}

/// The same probabilities from a kick-free constraint: the intervention is a
/// choice of physical state, ℛ⁻¹(t_i) U ℛ(t_i) Ψ, and the measurement is the
/// Born rule on the conditional state at `t_f`. The system spectrum must be
/// commensurate with the clock.
pub fn constraint_path_distribution(
    sc: &SignalingScenario,
    choice: &InterventionChoice,
    m: &MeasurementSpec,
) -> Result<Distribution> {
    let (h, phi) = sc.extended(choice)?;
    let spec = ConstraintSpec::new(vec![ClockTerm::new(sc.clock.clone())], h)?;
    let ns = NullSpace::new(&spec)?;
    let label = sc.clock.label();
    let kin = StateVector::new(
        spec.layout().clone(),
        tensor::insert_factor(spec.layout(), label, &sc.clock.time_state(0), &phi)?,
    )?;
    let psi = kinematical_to_physical(&spec, &kin, None)?;
    let psi = match choice.operator() {
        None => psi,
        Some(u) => {
            let mut cond = reduce(&psi, label, sc.t_i)?;
            let moved = u.apply_embedded(cond.layout(), cond.amps())?;
            cond.state = StateVector::new(cond.layout().clone(), moved)?;
            coreduce_with(&ns, &cond)?
        }
    };
    let cond = reduce(&psi, label, sc.t_f)?;
    m.probabilities(&reduced_subsystem_state(&cond, &m.labels())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceOutcome {
    pub label: String,
    pub distribution: Distribution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Signaling,
    NoSignaling,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Signaling => "signaling",
            Verdict::NoSignaling => "no-signaling",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalingReport {
    pub choices: Vec<ChoiceOutcome>,
    /// Largest pairwise total-variation distance between outcome distributions.
    pub max_tv_distance: f64,
    /// Largest pairwise trace distance between the measured factors' states at `t_f`.
    pub max_trace_distance: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

/// Runs every choice through the dilated measurement and compares the results.
pub fn compare_interventions(
    sc: &SignalingScenario,
    choices: &[InterventionChoice],
    m: &MeasurementSpec,
    threshold: Option<f64>,
) -> Result<SignalingReport> {
    if choices.len() < 2 {
        return Err(Error::InvalidArgument("comparison needs at least two choices".into()));
    }
    let threshold = threshold.unwrap_or(SIGNALING_THRESHOLD);
    let mut outs = Vec::new();
    let mut states = Vec::new();
    let mut checks = Vec::new();
    for c in choices {
        let dist = signaling_probability(sc, c, m)?;
        let born = born_rule_distribution(sc, c, m)?;
        checks.push(Check::at_most(format!("{}: normalization", c.label), (dist.total() - 1.0).abs(), 1e-10));
        checks.push(Check::at_most(format!("{}: dilation vs born rule", c.label), dist.max_abs_diff(&born), 1e-10));
        states.push(measured_state(sc, c, m)?);
        outs.push(ChoiceOutcome { label: c.label.clone(), distribution: dist });
    }
    let mut tv: f64 = 0.0;
    let mut td: f64 = 0.0;
    for i in 0..outs.len() {
        for j in i + 1..outs.len() {
            tv = tv.max(outs[i].distribution.tv_distance(&outs[j].distribution));
            td = td.max(trace_distance(&states[i], &states[j])?);
        }
    }
    let verdict = if tv > threshold { Verdict::Signaling } else { Verdict::NoSignaling };
    Ok(SignalingReport { choices: outs, max_tv_distance: tv, max_trace_distance: td, threshold, verdict, checks })
}

const C1: &str = "C1";
const C2: &str = "C2";

fn two_clocks(d: usize, dt: f64, second: f64) -> Result<(ClockModel, ClockModel, ClockTerm, ClockTerm)> {
    let c1 = build_clock(C1, d, dt, Direction::Forward)?;
    let c2 = build_clock(C2, d, dt, Direction::Forward)?;
    let t1 = ClockTerm::new(c1.clone());
    let t2 = ClockTerm { clock: c2.clone(), sign: second };
    Ok((c1, c2, t1, t2))
}

/// |t_0⟩_{C1} ⊗ Σ_k φ_k|t_k⟩_{C2} ⊗ |φ₀⟩.
fn seed_state(spec: &ConstraintSpec, c1: &ClockModel, chi: &[C64], phi0: &[C64]) -> Result<StateVector> {
    let rest: Vec<C64> = chi.iter().flat_map(|a| phi0.iter().map(move |b| a * b)).collect();
    StateVector::new(spec.layout().clone(), tensor::insert_factor(spec.layout(), C1, &c1.time_state(0), &rest)?)
}

/// An operation applied as a choice of physical state on two synchronized
/// clocks, observed from the first clock and from the second.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveSetup {
    pub d: usize,
    pub period: f64,
    pub system: Operator,
    pub operation: Operator,
    pub measurement: MeasurementSpec,
    /// Delocalization of C2 relative to C1.
    pub profile: ProfileKind,
    pub initial: Vec<C64>,
    pub t_i: f64,
    pub t_f: f64,
}

impl NaiveSetup {
    /// Qubits `A`, `B` in |00⟩, d = 16 per clock, period 2π, Y measurement on
    /// `B` at π/4, and a Gaussian profile of width 2·dt.
    pub fn two_qubit(system: Operator, operation: Operator) -> Self {
        let d = 16;
        let period = 2.0 * PI;
        let initial = presets::ground(system.layout());
        Self {
            d,
            period,
            system,
            operation,
            measurement: MeasurementSpec::pauli_y("B"),
            profile: ProfileKind::Gaussian { center: 0.0, sigma: 2.0 * period / d as f64 },
            initial,
            t_i: 0.0,
            t_f: PI / 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NaiveReport {
    /// Per-factor support of the operation relative to C1.
    pub frame1: Vec<(String, f64)>,
    /// Per-factor support relative to C2, restricted to the bulk levels of C1.
    pub frame2: Vec<(String, f64)>,
    pub bulk_levels: usize,
    pub p_frame1: Distribution,
    pub p_frame2: Distribution,
    pub checks: Vec<Check>,
}

pub fn naive_embedding_demo(setup: &NaiveSetup) -> Result<NaiveReport> {
    let dt = setup.period / setup.d as f64;
    let (c1, c2, t1, t2) = two_clocks(setup.d, dt, 1.0)?;
    let spec = ConstraintSpec::new(vec![t1, t2], setup.system.clone())?;
    let ns = NullSpace::new(&spec)?;
    let profile = build_profile(&c2, setup.profile)?;
    let kin = seed_state(&spec, &c1, &profile_state(&c2, &profile), &setup.initial)?;
    let psi = kinematical_to_physical(&spec, &kin, None)?;

    let mut cond = reduce(&psi, C1, setup.t_i)?;
    let op1 = setup.operation.embed(cond.layout())?;
    cond.state = StateVector::new(cond.layout().clone(), op1.apply_slice(cond.amps()))?;
    let psi_a = coreduce_with(&ns, &cond)?;

    let map_i = FrameMap::new(&ns, (C1, setup.t_i), (C2, setup.t_i))?;
    let op2 = map_i.conjugate(&op1)?;
    let levels = bulk_levels(&ns, &spec, C1, C2)?;
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no bulk levels; enlarge the clocks".into()));
    }
    let frame1 = support_norms(&op1)?;
    let frame2 = support_norms(&restrict_levels(&op2, C1, &levels)?)?;

    let m = &setup.measurement;
    let s1 = reduce(&psi_a, C1, setup.t_f)?;
    let p_frame1 = m.probabilities(&reduced_subsystem_state(&s1, &m.labels())?)?;
    let s2 = reduce(&psi_a, C2, setup.t_f)?;
    let map_f = FrameMap::new(&ns, (C1, setup.t_f), (C2, setup.t_f))?;
    let n2 = s2.norm().powi(2);
    let mut probs = Vec::new();
    for p in m.projectors() {
        let moved = map_f.conjugate(&p.embed(s1.layout())?)?;
        probs.push(moved.expectation(s2.amps(), s2.amps()).re / n2);
    }
    let p_frame2 = Distribution::clamped(m.outcomes.clone(), probs);
    let checks = vec![
        Check::at_most("frame invariance of probabilities", p_frame1.max_abs_diff(&p_frame2), 1e-8),
        Check::at_most("normalization", (p_frame1.total() - 1.0).abs(), 1e-10),
    ];
    Ok(NaiveReport { frame1, frame2, bulk_levels: levels.len(), p_frame1, p_frame2, checks })
}

/// H with e^{-iΔτH} = W and every eigenvalue an integer multiple of ω,
/// picking the smallest magnitude among the admissible branches.
fn commensurate_log(w: &Operator, delta_tau: f64, omega: f64) -> Result<Operator> {
    check_unitary(w)?;
    let re = w.add(&w.adjoint())?.scale_real(0.5).symmetrized();
    let im = w.sub(&w.adjoint())?.scale(C64::new(0.0, -0.5)).symmetrized();
    // A generic real combination of the commuting parts separates the eigenphases.
    let mix = re.add(&im.scale_real(core::f64::consts::SQRT_2))?.symmetrized();
    let e = eigh(&mix)?;
    let n = w.dim();
    let branch = 2.0 * PI / delta_tau;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let v = e.vector(k);
        let z = tensor::inner(&v, &w.apply_slice(&v));
        let h0 = -z.arg() / delta_tau;
        let mut best: Option<f64> = None;
        for m in -8i32..=8 {
            let h = h0 + m as f64 * branch;
            let q = h / omega;
            if (q - q.round()).abs() < 1e-9 && best.is_none_or(|b| h.abs() < b.abs()) {
                best = Some(q.round() * omega);
            }
        }
        values.push(best.ok_or(Error::NotCommensurate)?);
    }
    let vecs = e.vectors.data();
    let h = Operator::from_fn(w.layout().clone(), |i, j| {
        (0..n).map(|k| vecs[i * n + k] * values[k] * vecs[j * n + k].conj()).sum()
    })
    .symmetrized();
    let check = expm_hermitian_generator(&h, delta_tau)?.sub(w)?.norm_max();
    if check > 1e-9 {
        return Err(Error::InvalidArgument("unitary has a degenerate eigenbasis the log could not resolve".into()));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversedSetup {
    pub u_a: Operator,
    pub u_b: Operator,
    pub initial: Vec<C64>,
    pub d: usize,
    pub period: f64,
    pub delta_tau: f64,
    pub sigma: f64,
}

impl ReversedSetup {
    /// d = 64 per clock, period 2π, Δτ = P/4 and the target in |+⟩.
    pub fn new(u_a: Operator, u_b: Operator, sigma: f64) -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut initial = vec![ZERO; u_a.dim()];
        initial[0] = C64::new(h, 0.0);
        initial[1] = C64::new(h, 0.0);
        Self { u_a, u_b, initial, d: 64, period: 2.0 * PI, delta_tau: PI / 2.0, sigma }
    }

    pub fn dt(&self) -> f64 {
        self.period / self.d as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversedReport {
    pub rho_c1: Operator,
    pub rho_c2: Operator,
    /// Trace distance of the C1 state from U_B U_A ρ₀ U_A† U_B†.
    pub distance_c1: f64,
    /// Trace distance of the C2 state from U_A U_B ρ₀ U_B† U_A†.
    pub distance: f64,
}

/// Two clocks running in opposite directions around a system whose evolution
/// over Δτ composes U_A then U_B; compares the C2 description at Δτ with the
/// reversed composition.
pub fn reversed_clock_ordering(setup: &ReversedSetup) -> Result<ReversedReport> {
    if setup.u_a.layout() != setup.u_b.layout() {
        return Err(Error::DimensionMismatch("U_A and U_B must act on the same factors".into()));
    }
    let dt = setup.dt();
    let (c1, c2, t1, t2) = two_clocks(setup.d, dt, -1.0)?;
    let w = setup.u_b.matmul(&setup.u_a)?;
    let h = commensurate_log(&w, setup.delta_tau, c1.omega())?;
    let spec = ConstraintSpec::new(vec![t1, t2], h)?;
    let profile = build_profile(&c2, ProfileKind::Gaussian { center: 0.0, sigma: setup.sigma })?;
    let kin = seed_state(&spec, &c1, &profile_state(&c2, &profile), &setup.initial)?;
    let psi = kinematical_to_physical(&spec, &kin, None)?;
    let target = setup.u_a.layout().factors()[0].label.clone();

    let rho_c1 = reduced_subsystem_state(&reduce(&psi, C1, setup.delta_tau)?, &[&target])?;
    let rho_c2 = reduced_subsystem_state(&reduce(&psi, C2, setup.delta_tau)?, &[&target])?;
    let layout = setup.u_a.layout().clone();
    let order = |first: &Operator, second: &Operator| -> Result<Operator> {
        let v = second.apply_slice(&first.apply_slice(&setup.initial));
        reduced_density(&layout, &v, &[&target])
    };
    let ba = order(&setup.u_a, &setup.u_b)?;
    let ab = order(&setup.u_b, &setup.u_a)?;
    Ok(ReversedReport {
        distance_c1: trace_distance(&rho_c1, &ba)?,
        distance: trace_distance(&rho_c2, &ab)?,
        rho_c1,
        rho_c2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyncProfile {
    Kronecker,
    /// Width in physical time, held fixed as d changes.
    Gaussian {
        sigma: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyncRow {
    pub d: usize,
    pub profile: SyncProfile,
    pub norm: f64,
}

/// Physical norm d²‖⟨t_0|_{C1} P |φ⟩‖² for the seed
/// |t_0⟩_{C1} ⊗ Σ_k c_k|t_k⟩_{C2} ⊗ |0⟩ with c_k = φ_k / (√dt Σ_j φ_j), i.e.
/// the profile taken as a unit-mass density. The system is a free qubit.
pub fn sync_physical_norm(d: usize, period: f64, profile: SyncProfile) -> Result<f64> {
    let dt = period / d as f64;
    let (c1, c2, t1, t2) = two_clocks(d, dt, 1.0)?;
    let spec = ConstraintSpec::new(vec![t1, t2], Operator::zeros(SpaceLayout::single("S", 2)?))?;
    let ns = NullSpace::new(&spec)?;
    let kind = match profile {
        SyncProfile::Kronecker => ProfileKind::Kronecker { center: 0.0 },
        SyncProfile::Gaussian { sigma } => ProfileKind::Gaussian { center: 0.0, sigma },
    };
    let phi = build_profile(&c2, kind)?;
    let mass: f64 = phi.samples.iter().map(|a| a.re).sum();
    let c: Vec<C64> = phi.samples.iter().map(|a| a / (dt.sqrt() * mass)).collect();
    let kin = seed_state(&spec, &c1, &c2.from_time_basis(&c), &[ONE, ZERO])?;
    let (_, v) = contract_factor(spec.layout(), &ns.project(kin.amps()), C1, &c1.time_state(0))?;
    Ok((d * d) as f64 * tensor::norm(&v).powi(2))
}

/// The same norm with a single clock; equal to one for every d.
pub fn single_clock_physical_norm(d: usize, period: f64) -> Result<f64> {
    let c = build_clock(C1, d, period / d as f64, Direction::Forward)?;
    let spec = ConstraintSpec::new(vec![ClockTerm::new(c.clone())], Operator::zeros(SpaceLayout::single("S", 2)?))?;
    let ns = NullSpace::new(&spec)?;
    let kin = tensor::insert_factor(spec.layout(), C1, &c.time_state(0), &[ONE, ZERO])?;
    let (_, v) = contract_factor(spec.layout(), &ns.project(&kin), C1, &c.time_state(0))?;
    Ok((d * d) as f64 * tensor::norm(&v).powi(2))
}

/// Rows in `dims` × `profiles` order.
pub fn sync_divergence_scan(dims: &[usize], profiles: &[SyncProfile], period: f64) -> Result<Vec<SyncRow>> {
    let mut rows = Vec::new();
    for &d in dims {
        for &profile in profiles {
            rows.push(SyncRow { d, profile, norm: sync_physical_norm(d, period, profile)? });
        }
    }
    Ok(rows)
}

/// Two operations timed by different clocks, with C2 delocalized relative to C1.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchSetup {
    pub d: usize,
    pub dt: f64,
    pub system: Operator,
    /// Timed by C1.
    pub u_a: Operator,
    /// Timed by C2.
    pub u_b: Operator,
    pub tau_a: f64,
    pub tau_b: f64,
    pub profile: ProfileKind,
    pub initial: Vec<C64>,
    /// Reading at which both frames are inspected; defaults to the first grid
    /// point past both kicks plus six widths of the profile.
    pub readout: Option<f64>,
}

impl SwitchSetup {
    /// One qubit `S` in |0⟩, d = 32, dt = 1/4, both kicks at 2 and a bimodal
    /// profile with peaks ±1.5 of width 0.5.
    pub fn qubit(system: Operator, u_a: Operator, u_b: Operator) -> Self {
        let initial = presets::ground(system.layout());
        Self {
            d: 32,
            dt: 0.25,
            system,
            u_a,
            u_b,
            tau_a: 2.0,
            tau_b: 2.0,
            profile: ProfileKind::Bimodal { center: 0.0, offset: 1.5, sigma: 0.5 },
            initial,
            readout: None,
        }
    }

    fn build(&self) -> Result<(KickedScenario, Vec<C64>)> {
        let (c1, c2, _, _) = two_clocks(self.d, self.dt, 1.0)?;
        let phi = build_profile(&c2, self.profile)?;
        let layout = self.system.layout();
        let schedule = KickSchedule::new(
            layout,
            vec![
                Kick::from_unitary(C1, self.tau_a, self.u_a.clone())?,
                Kick::from_unitary(C2, self.tau_b, self.u_b.clone())?,
            ],
        )?;
        let scenario = KickedScenario::new(
            vec![c1, c2],
            &self.system,
            schedule,
            self.initial.clone(),
            phi.samples.clone(),
            TwoClockForm::Composed,
        )?;
        Ok((scenario, phi.samples))
    }

    fn reach(&self) -> f64 {
        match self.profile {
            ProfileKind::Kronecker { center } => center.abs(),
            ProfileKind::Gaussian { center, sigma } => center.abs() + 6.0 * sigma,
            ProfileKind::Bimodal { center, offset, sigma } => center.abs() + offset + 6.0 * sigma,
        }
    }

    fn readout_time(&self) -> Result<f64> {
        let r = match self.readout {
            Some(r) => r,
            None => ((self.tau_a.max(self.tau_b) + self.reach()) / self.dt).ceil() * self.dt + self.dt,
        };
        if r >= self.d as f64 * self.dt {
            return Err(Error::GuardGapViolation(r));
        }
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderVerdict {
    Indefinite,
    Definite(Branch),
    Undetermined,
}

impl OrderVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderVerdict::Indefinite => "indefinite",
            OrderVerdict::Definite(b) => b.as_str(),
            OrderVerdict::Undetermined => "undetermined",
        }
    }
}

/// One peak of the profile as seen from one clock.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchWindow {
    /// Signed offset of the peak sample.
    pub peak: f64,
    pub weight: f64,
    pub order: Branch,
    /// Fraction of the window's weight carried by `order`.
    pub purity: f64,
    /// Normalized system state at the peak sample.
    pub state: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameOrder {
    pub clock: String,
    pub tau: f64,
    pub windows: Vec<BranchWindow>,
    /// Weight of each firing order over the whole profile.
    pub order_weights: Vec<(Branch, f64)>,
    pub verdict: OrderVerdict,
    /// ⟨late peak|early peak⟩ of the system states, bimodal profiles only.
    pub branch_overlap: Option<C64>,
    /// (p₊ − p₋)/(p₊ + p₋) for the other clock projected on (|c_late⟩ ± |c_early⟩)/√2.
    pub interference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchReport {
    pub frames: Vec<FrameOrder>,
    pub threshold: f64,
    pub checks: Vec<Check>,
}

fn profile_center(kind: ProfileKind) -> f64 {
    match kind {
        ProfileKind::Kronecker { center }
        | ProfileKind::Gaussian { center, .. }
        | ProfileKind::Bimodal { center, .. } => center,
    }
}

fn branch_index(b: Branch) -> usize {
    match b {
        Branch::None => 0,
        Branch::AOnly => 1,
        Branch::BOnly => 2,
        Branch::AThenB => 3,
        Branch::BThenA => 4,
    }
}

const BRANCHES: [Branch; 5] = [Branch::None, Branch::AOnly, Branch::BOnly, Branch::AThenB, Branch::BThenA];

fn frame_order(scenario: &KickedScenario, clock: &str, tau: f64, profile: ProfileKind, dt: f64) -> Result<FrameOrder> {
    let comps = scenario.components(clock, tau)?;
    let bimodal = matches!(profile, ProfileKind::Bimodal { .. });
    let center = profile_center(profile);
    // Window 0 is early (t₂ < center), window 1 late; the center sample counts half in each.
    let nw = if bimodal { 2 } else { 1 };
    let mut weights = vec![[0.0f64; 5]; nw];
    let mut peaks: Vec<Option<&Component>> = vec![None; nw];
    for c in &comps {
        let w = c.amplitude.norm_sqr();
        let shares: Vec<(usize, f64)> = if !bimodal {
            vec![(0, w)]
        } else if (c.t2 - center).abs() < 0.5 * dt {
            vec![(0, 0.5 * w), (1, 0.5 * w)]
        } else if c.t2 < center {
            vec![(0, w)]
        } else {
            vec![(1, w)]
        };
        for (win, x) in shares {
            weights[win][branch_index(c.branch)] += x;
            if peaks[win].is_none_or(|p| p.amplitude.norm_sqr() < w) {
                peaks[win] = Some(c);
            }
        }
    }
    let mut windows = Vec::new();
    for (win, ws) in weights.iter().enumerate() {
        let total: f64 = ws.iter().sum();
        let (bi, bw) = ws.iter().enumerate().fold((0, -1.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        let peak = peaks[win].ok_or_else(|| Error::InvalidArgument("empty profile window".into()))?;
        let n = tensor::norm(&peak.system);
        windows.push(BranchWindow {
            peak: peak.t2,
            weight: total,
            order: BRANCHES[bi],
            purity: if total > 0.0 { bw / total } else { 0.0 },
            state: peak.system.iter().map(|a| a / n).collect(),
        });
    }
    let order_weights: Vec<(Branch, f64)> = [Branch::AThenB, Branch::BThenA]
        .iter()
        .map(|&b| (b, weights.iter().map(|w| w[branch_index(b)]).sum()))
        .collect();
    let present: Vec<Branch> = order_weights.iter().filter(|(_, w)| *w > ORDER_THRESHOLD).map(|(b, _)| *b).collect();
    let verdict = match present.as_slice() {
        [_, _] => OrderVerdict::Indefinite,
        [b] => OrderVerdict::Definite(*b),
        _ => OrderVerdict::Undetermined,
    };
    let (branch_overlap, interference) = if bimodal {
        let overlap = tensor::inner(&windows[1].state, &windows[0].state);
        // Control states on the other clock, center sample excluded.
        let m = scenario.phi0().len();
        let mut v = [vec![ZERO; m], vec![ZERO; m]];
        let mut norms = [0.0f64; 2];
        for c in &comps {
            if (c.t2 - center).abs() < 0.5 * dt {
                continue;
            }
            let win = usize::from(c.t2 > center);
            let w = c.amplitude.norm_sqr();
            norms[win] += w;
            for (x, s) in v[win].iter_mut().zip(&c.system) {
                *x += s * w;
            }
        }
        let scale = |i: usize| 1.0 / norms[i].sqrt();
        let late: Vec<C64> = v[1].iter().map(|x| x * scale(1)).collect();
        let early: Vec<C64> = v[0].iter().map(|x| x * scale(0)).collect();
        let plus: f64 = late.iter().zip(&early).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>() * 0.5;
        let minus: f64 = late.iter().zip(&early).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * 0.5;
        (Some(overlap), Some((plus - minus) / (plus + minus)))
    } else {
        (None, None)
    };
    Ok(FrameOrder { clock: clock.to_string(), tau, windows, order_weights, verdict, branch_overlap, interference })
}

/// Conditional states of the switch in both frames, branch weights per peak
/// and the order each frame reports.
pub fn quantum_switch_scenario(setup: &SwitchSetup) -> Result<SwitchReport> {
    if let ProfileKind::Bimodal { offset, sigma, .. } = setup.profile {
        if offset < 3.0 * sigma {
            return Err(Error::IndistinctBranches { offset, sigma });
        }
    }
    let readout = setup.readout_time()?;
    let (scenario, _) = setup.build()?;
    let frames = [C1, C2]
        .iter()
        .map(|c| frame_order(&scenario, c, readout, setup.profile, setup.dt))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = vec![Check::at_most(
        "frames agree on the order",
        if frames[0].verdict == frames[1].verdict { 0.0 } else { 1.0 },
        0.0,
    )];
    for f in &frames {
        let total: f64 = f.windows.iter().map(|w| w.weight).sum();
        checks.push(Check::at_most(format!("{}: weights sum to one", f.clock), (total - 1.0).abs(), 1e-10));
    }
    Ok(SwitchReport { frames, threshold: ORDER_THRESHOLD, checks })
}

/// Two operations on different clocks, separated enough for a definite order,
/// with a dilated measurement read off at a common reading.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFrameSetup {
    pub d: usize,
    pub dt: f64,
    pub system: Operator,
    /// Timed by C1.
    pub intervention: Operator,
    /// Measured through a dilation timed by C2.
    pub measurement: MeasurementSpec,
    pub tau_a: f64,
    pub tau_b: f64,
    /// Gaussian or Kronecker.
    pub profile: ProfileKind,
    pub initial: Vec<C64>,
}

impl TwoFrameSetup {
    /// Qubits `A`, `B` in |00⟩ under X⊗X, Hadamard on `A` at 4·dt, Y measurement
    /// on `B` at 12·dt, d = 64, period 2π and a Gaussian profile of width dt.
    pub fn two_qubit() -> Self {
        let d = 64;
        let dt = 2.0 * PI / d as f64;
        let system = presets::xx_coupling("A", "B");
        let initial = presets::ground(system.layout());
        Self {
            d,
            dt,
            system,
            intervention: expm_hermitian_generator(&presets::hadamard_generator("A"), 1.0).unwrap(),
            measurement: MeasurementSpec::pauli_y("B"),
            tau_a: 4.0 * dt,
            tau_b: 12.0 * dt,
            profile: ProfileKind::Gaussian { center: 0.0, sigma: dt },
            initial,
        }
    }

    fn sigma(&self) -> Result<f64> {
        match self.profile {
            ProfileKind::Kronecker { .. } => Ok(0.0),
            ProfileKind::Gaussian { sigma, .. } => Ok(sigma),
            ProfileKind::Bimodal { .. } => {
                Err(Error::InvalidArgument("bimodal profiles belong to the switch scenario".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameConsistency {
    pub clock: String,
    pub order: Branch,
    pub order_weight: f64,
    /// Which operation appears delocalized ("A" or "B") and the spread of its
    /// firing reading on this frame's clock.
    pub delocalized: (String, f64),
    pub distribution: Distribution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoFrameReport {
    pub readout: f64,
    pub frames: Vec<FrameConsistency>,
    /// Both operations on one clock at the same readings.
    pub single_clock: Distribution,
    pub checks: Vec<Check>,
}

pub fn two_frame_causal_consistency(setup: &TwoFrameSetup) -> Result<TwoFrameReport> {
    let sigma = setup.sigma()?;
    let separation = (setup.tau_a - setup.tau_b).abs();
    if separation <= 3.0 * sigma || separation == 0.0 {
        return Err(Error::OrderNotDefined { separation, sigma });
    }
    let m = &setup.measurement;
    let ancilla = format!("{}p", m.labels().join(""));
    let (layout, phi0) = append_ground(setup.system.layout(), &setup.initial, &ancilla, m.outcomes.len())?;
    let h = setup.system.embed(&layout)?;
    let dil = m.dilation(&ancilla)?;
    let reach = 6.0 * sigma + profile_center(setup.profile).abs();
    let readout = ((setup.tau_a.max(setup.tau_b) + reach) / setup.dt).ceil() * setup.dt + setup.dt;
    if readout >= setup.d as f64 * setup.dt {
        return Err(Error::GuardGapViolation(readout));
    }
    let (c1, c2, _, _) = two_clocks(setup.d, setup.dt, 1.0)?;
    let phi = build_profile(&c2, setup.profile)?;
    let schedule = KickSchedule::new(
        &layout,
        vec![
            Kick::from_unitary(C1, setup.tau_a, setup.intervention.clone())?,
            Kick::from_unitary(C2, setup.tau_b, dil.clone())?,
        ],
    )?;
    let scenario =
        KickedScenario::new(vec![c1.clone(), c2], &h, schedule, phi0.clone(), phi.samples, TwoClockForm::Composed)?;

    let mut frames = Vec::new();
    for (clock, other) in [(C1, "B"), (C2, "A")] {
        let comps = scenario.components(clock, readout)?;
        let mut w = [0.0f64; 5];
        let (mut mean, mut sq) = (0.0, 0.0);
        for c in &comps {
            let p = c.amplitude.norm_sqr();
            w[branch_index(c.branch)] += p;
            mean += p * c.t2;
            sq += p * c.t2 * c.t2;
        }
        let (bi, bw) = w.iter().enumerate().fold((0, -1.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        let cond = scenario.conditional(clock, readout)?;
        let distribution = m.readout(&ancilla, &reduced_subsystem_state(&cond, &[&ancilla])?)?;
        frames.push(FrameConsistency {
            clock: clock.to_string(),
            order: BRANCHES[bi],
            order_weight: bw,
            delocalized: (other.to_string(), (sq - mean * mean).max(0.0).sqrt()),
            distribution,
        });
    }

    let single_schedule = {
        let mut ks = vec![(setup.tau_a, setup.intervention.clone()), (setup.tau_b, dil)];
        ks.sort_by(|a, b| a.0.total_cmp(&b.0));
        KickSchedule::new(
            &layout,
            ks.into_iter().map(|(t, u)| Kick::from_unitary(C1, t, u)).collect::<Result<Vec<_>>>()?,
        )?
    };
    let single = KickedScenario::new(vec![c1], &h, single_schedule, phi0, Vec::new(), TwoClockForm::Composed)?;
    let cond = single.conditional(C1, readout)?;
    let single_clock = m.readout(&ancilla, &reduced_subsystem_state(&cond, &[&ancilla])?)?;

    let expected = if setup.tau_a < setup.tau_b { Branch::AThenB } else { Branch::BThenA };
    let checks = vec![
        Check::at_most(
            "frames agree on probabilities",
            frames[0].distribution.max_abs_diff(&frames[1].distribution),
            1e-6,
        ),
        Check::at_most(
            "frames agree on the order",
            if frames.iter().all(|f| f.order == expected) { 0.0 } else { 1.0 },
            0.0,
        ),
        Check::at_most("normalization", (frames[0].distribution.total() - 1.0).abs(), 1e-10),
    ];
    Ok(TwoFrameReport { readout, frames, single_clock, checks })
}
