//! Reductions to clock-conditioned states, their inverses and frame changes.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::constraint::{ConstraintSpec, Method, NullSpace, PhysicalState, Source};
use crate::tensor::{
    self, contract_factor, insert_factor, partial_trace, reduced_density, Operator, SpaceLayout, StateVector,
    TraceMode, C64, ZERO,
};
use crate::{Error, Result};

/// State of everything but one clock, conditioned on that clock reading `tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalState {
    pub clock: String,
    pub tau: f64,
    pub state: StateVector,
}

impl ConditionalState {
    pub fn layout(&self) -> &SpaceLayout {
        self.state.layout()
    }

    pub fn amps(&self) -> &[C64] {
        self.state.amps()
    }

    pub fn norm(&self) -> f64 {
        self.state.norm()
    }
}

/// ⟨τ|_clock ⊗ 1 applied to a physical state.
pub fn reduce(psi: &PhysicalState, clock: &str, tau: f64) -> Result<ConditionalState> {
    let c = psi.clock(clock)?;
    let k = c.grid_index(tau)?;
    let (layout, amps) = contract_factor(psi.layout(), psi.state.amps(), clock, &c.time_state(k))?;
    Ok(ConditionalState { clock: clock.to_string(), tau, state: StateVector::new(layout, amps)? })
}

/// Conditional states at every grid reading of `clock`, in grid order.
pub fn trajectory(psi: &PhysicalState, clock: &str) -> Result<Vec<Vec<C64>>> {
    let c = psi.clock(clock)?;
    (0..c.dim()).map(|k| Ok(contract_factor(psi.layout(), psi.state.amps(), clock, &c.time_state(k))?.1)).collect()
}

/// P(|τ⟩_clock ⊗ cond) for a kick-free constraint, without renormalization.
pub fn coreduce(cond: &ConditionalState, spec: &ConstraintSpec) -> Result<PhysicalState> {
    let ns = NullSpace::new(spec)?;
    coreduce_with(&ns, cond)
}

pub fn coreduce_with(ns: &NullSpace, cond: &ConditionalState) -> Result<PhysicalState> {
    let clock =
        ns.clocks().iter().find(|c| c.label() == cond.clock).ok_or_else(|| Error::UnknownFactor(cond.clock.clone()))?;
    let k = clock.grid_index(cond.tau)?;
    if &ns.layout().without(&cond.clock)? != cond.layout() {
        return Err(Error::DimensionMismatch("conditional state layout".into()));
    }
    let kin = insert_factor(ns.layout(), &cond.clock, &clock.time_state(k), cond.amps())?;
    let seed = StateVector::new(ns.layout().clone(), kin)?;
    let out = ns.project(seed.amps());
    Ok(PhysicalState {
        state: StateVector::new(ns.layout().clone(), out)?,
        clocks: ns.clocks().to_vec(),
        source: Source { method: Method::NullSpace, seed: Some(seed) },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameChange {
    /// Unit-norm state relative to the target clock.
    pub state: ConditionalState,
    /// Norm of the raw image divided by the norm of the input.
    pub scale: f64,
}

pub fn frame_change(
    cond: &ConditionalState,
    spec: &ConstraintSpec,
    to_clock: &str,
    tau_to: f64,
) -> Result<FrameChange> {
    let ns = NullSpace::new(spec)?;
    let psi = coreduce_with(&ns, cond)?;
    let raw = reduce(&psi, to_clock, tau_to)?;
    let n = raw.norm();
    let scale = n / cond.norm();
    if n == 0.0 {
        return Err(Error::DegenerateNormalization { clock: to_clock.to_string(), tau: tau_to });
    }
    Ok(FrameChange { state: ConditionalState { state: raw.state.normalized()?, ..raw }, scale })
}

/// Matrix of ℛ_j(τ_j) ℛ_i⁻¹(τ_i) between two conditional layouts.
#[derive(Clone, Debug)]
pub struct FrameMap {
    pub from: SpaceLayout,
    pub to: SpaceLayout,
    /// Row-major, `to.dim()` rows by `from.dim()` columns.
    matrix: Vec<C64>,
    /// c with (cS)†(cS) a projector.
    pub scale: f64,
}

impl FrameMap {
    pub fn new(ns: &NullSpace, from: (&str, f64), to: (&str, f64)) -> Result<Self> {
        let full = ns.layout();
        let find =
            |l: &str| ns.clocks().iter().find(|c| c.label() == l).ok_or_else(|| Error::UnknownFactor(l.to_string()));
        let (ci, cj) = (find(from.0)?, find(to.0)?);
        let ket = ci.time_state(ci.grid_index(from.1)?);
        let bra = cj.time_state(cj.grid_index(to.1)?);
        let from_layout = full.without(from.0)?;
        let to_layout = full.without(to.0)?;
        let (di, dj) = (from_layout.dim(), to_layout.dim());
        let mut matrix = vec![ZERO; dj * di];
        let mut e = vec![ZERO; di];
        for a in 0..di {
            e[a] = C64::new(1.0, 0.0);
            let v = insert_factor(full, from.0, &ket, &e)?;
            let (_, col) = contract_factor(full, &ns.project(&v), to.0, &bra)?;
            for (r, x) in col.into_iter().enumerate() {
                matrix[r * di + a] = x;
            }
            e[a] = ZERO;
        }
        // tr(S†S) / tr((S†S)²) rescales S to a partial isometry when S†S ∝ projector.
        let mut sts = vec![ZERO; di * di];
        for a in 0..di {
            for b in 0..di {
                sts[a * di + b] = (0..dj).map(|r| matrix[r * di + a].conj() * matrix[r * di + b]).sum();
            }
        }
        let t1: f64 = (0..di).map(|a| sts[a * di + a].re).sum();
        let t2: f64 = sts.iter().map(|x| x.norm_sqr()).sum();
        if t1 == 0.0 {
            return Err(Error::DegenerateNormalization { clock: to.0.to_string(), tau: to.1 });
        }
        Ok(Self { from: from_layout, to: to_layout, matrix, scale: (t1 / t2).sqrt() })
    }

    /// Raw S v.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let di = self.from.dim();
        (0..self.to.dim()).map(|r| self.matrix[r * di..(r + 1) * di].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// c² S O S†.
    pub fn conjugate(&self, o: &Operator) -> Result<Operator> {
        if o.layout() != &self.from {
            return Err(Error::DimensionMismatch(format!(
                "observable lives on {:?}, frame map starts from {:?}",
                o.layout(),
                self.from
            )));
        }
        let (di, dj) = (self.from.dim(), self.to.dim());
        let od = o.data();
        // X = S O, then X S†.
        let mut x = vec![ZERO; dj * di];
        for r in 0..dj {
            for b in 0..di {
                x[r * di + b] = (0..di).map(|a| self.matrix[r * di + a] * od[a * di + b]).sum();
            }
        }
        let c2 = self.scale * self.scale;
        let out = Operator::from_fn(self.to.clone(), |r, s| {
            (0..di).map(|b| x[r * di + b] * self.matrix[s * di + b].conj()).sum::<C64>() * c2
        });
        Ok(if o.hermitian_hint() { out.symmetrized() } else { out })
    }
}

/// Observable relative to clock `from.0` expressed relative to clock `to.0`.
pub fn transform_observable(
    o: &Operator,
    spec: &ConstraintSpec,
    from: (&str, f64),
    to: (&str, f64),
) -> Result<Operator> {
    let o = o.clone().into_hermitian()?;
    FrameMap::new(&NullSpace::new(spec)?, from, to)?.conjugate(&o)
}

/// max_k ‖ i(ψ_{k+1} − ψ_{k−1})/(2dt) − H ψ_k ‖ over interior grid points,
/// relative to ‖ψ_0‖. `h_rest` may act on any subset of the conditional factors.
pub fn schrodinger_residual(psi: &PhysicalState, clock: &str, h_rest: &Operator) -> Result<f64> {
    let c = psi.clock(clock)?;
    let traj = trajectory(psi, clock)?;
    let cond_layout = psi.layout().without(clock)?;
    let dt = c.dt();
    let scale = tensor::norm(&traj[0]);
    if scale == 0.0 {
        return Err(Error::DegenerateNormalization { clock: clock.to_string(), tau: 0.0 });
    }
    let mut worst: f64 = 0.0;
    for k in 1..c.dim() - 1 {
        let h = h_rest.apply_embedded(&cond_layout, &traj[k])?;
        let r: f64 = traj[k + 1]
            .iter()
            .zip(&traj[k - 1])
            .zip(&h)
            .map(|((a, b), hv)| (C64::new(0.0, 1.0) * (a - b) / (2.0 * dt) - hv).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    Ok(worst / scale)
}

/// Normalized reduced density operator of a conditional state on the kept factors.
pub fn reduced_subsystem_state(cond: &ConditionalState, keep: &[&str]) -> Result<Operator> {
    let n2 = cond.norm().powi(2);
    if n2 == 0.0 {
        return Err(Error::DegenerateNormalization { clock: cond.clock.clone(), tau: cond.tau });
    }
    let rho = reduced_density(cond.layout(), cond.amps(), keep)?;
    Ok(rho.scale_real(1.0 / n2))
}

/// ‖O − 1_F ⊗ Tr_F(O)/d_F‖_F for every factor F: zero iff O acts trivially on F.
pub fn support_norms(o: &Operator) -> Result<Vec<(String, f64)>> {
    let layout = o.layout();
    let mut out = Vec::new();
    for f in layout.factors() {
        let others: Vec<&str> = layout.labels().filter(|l| *l != f.label).collect();
        let reduced = partial_trace(o, &others, TraceMode::General)?.scale_real(1.0 / f.dim as f64);
        let lifted = reduced.embed(layout)?;
        out.push((f.label.clone(), o.sub(&lifted)?.norm_fro()));
    }
    Ok(out)
}

/// Frobenius norm of the part of `o` coupling the factors in `group` to the rest.
pub fn coupling_norm(o: &Operator, group: &[&str]) -> Result<f64> {
    let layout = o.layout();
    let rest: Vec<&str> = layout.labels().filter(|l| !group.contains(l)).collect();
    let ga = layout.select(group)?;
    let gr = layout.select(&rest)?;
    let on_a = partial_trace(o, group, TraceMode::General)?.scale_real(1.0 / gr.dim() as f64);
    let on_r = partial_trace(o, &rest, TraceMode::General)?.scale_real(1.0 / ga.dim() as f64);
    let scalar = o.trace() / layout.dim() as f64;
    let local =
        on_a.embed(layout)?.add(&on_r.embed(layout)?)?.sub(&Operator::identity(layout.clone()).scale(scalar))?;
    Ok(o.sub(&local)?.norm_fro())
}

/// Energy levels of clock `present` that stay away from the window edges:
/// for every system eigenvalue the zero-sum partner level of clock `absent`
/// exists. Only two-clock constraints are supported.
pub fn bulk_levels(ns: &NullSpace, spec: &ConstraintSpec, present: &str, absent: &str) -> Result<Vec<usize>> {
    if spec.clocks().len() != 2 {
        return Err(Error::InvalidArgument("bulk levels need exactly two clocks".into()));
    }
    let term = |l: &str| {
        spec.clocks().iter().find(|t| t.clock.label() == l).ok_or_else(|| Error::UnknownFactor(l.to_string()))
    };
    let (tp, ta) = (term(present)?, term(absent)?);
    let ea: Vec<f64> = ta.clock.energies().iter().map(|e| e * ta.sign).collect();
    let tol = ns.tol();
    Ok((0..tp.clock.dim())
        .filter(|&n| {
            let ep = tp.sign * tp.clock.energy(n);
            ns.system_eigh().values.iter().all(|l| ea.iter().any(|e| (ep + e + l).abs() < tol))
        })
        .collect())
}

/// Restricts an operator to the given energy levels of one clock factor.
pub fn restrict_levels(o: &Operator, clock: &str, levels: &[usize]) -> Result<Operator> {
    let layout = o.layout();
    let p = layout.position(clock)?;
    let small = layout.with_dim(clock, levels.len())?;
    let map: Vec<usize> = (0..small.dim())
        .map(|idx| {
            let mut d = small.digits(idx);
            d[p] = levels[d[p]];
            layout.index(&d)
        })
        .collect();
    let mut out = Operator::from_fn(small, |i, j| o.get(map[i], map[j]));
    if o.hermitian_hint() {
        out = out.symmetrized();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{build_clock, Direction};
    use crate::constraint::{kinematical_to_physical, ClockTerm};
    use crate::tensor::gates;

    #[test]
    fn zero_hamiltonian_conditional_is_constant() {
        let c = build_clock("C", 8, 0.5, Direction::Forward).unwrap();
        let spec =
            ConstraintSpec::new(vec![ClockTerm::new(c.clone())], Operator::zeros(SpaceLayout::single("S", 2).unwrap()))
                .unwrap();
        let phi0 = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let kin = StateVector::new(
            spec.layout().clone(),
            insert_factor(spec.layout(), "C", &c.time_state(0), &phi0).unwrap(),
        )
        .unwrap();
        let psi = kinematical_to_physical(&spec, &kin, None).unwrap();
        for k in 0..8 {
            let cond = reduce(&psi, "C", c.time(k)).unwrap();
            for (a, b) in cond.amps().iter().zip(&phi0) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!(schrodinger_residual(&psi, "C", spec.system()).unwrap() < 1e-12);
    }

    #[test]
    fn support_of_local_operator() {
        let layout = SpaceLayout::new([("A", 2), ("B", 2)]).unwrap();
        let xa = gates::pauli_x("A").embed(&layout).unwrap();
        let s = support_norms(&xa).unwrap();
        assert!(s[0].1 > 1.0 && s[1].1 < 1e-14);
        assert!(coupling_norm(&xa, &["A"]).unwrap() < 1e-14);
        let xx = tensor::kron(&gates::pauli_x("A"), &gates::pauli_x("B")).unwrap();
        assert!((coupling_norm(&xx, &["A"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn restrict_levels_picks_block() {
        let layout = SpaceLayout::new([("C", 3), ("S", 2)]).unwrap();
        let o = Operator::from_fn(layout, |i, j| C64::new((i * 10 + j) as f64, 0.0));
        let r = restrict_levels(&o, "C", &[2]).unwrap();
        assert_eq!(r.get(0, 1), C64::new(45.0, 0.0));
    }
}
