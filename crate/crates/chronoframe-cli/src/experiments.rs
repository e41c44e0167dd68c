//! One sweep point of each experiment: build the operators a scenario names,
//! call into the library, and flatten the report into a record and CSV rows.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use chronoframe::causality::{
    born_rule_distribution, compare_interventions, constraint_path_distribution, naive_embedding_demo, presets,
    quantum_switch_scenario, reversed_clock_ordering, single_clock_physical_norm, sync_physical_norm,
    two_frame_causal_consistency, Check, Distribution, InterventionChoice, MeasurementSpec, NaiveSetup, ReversedSetup,
    SignalingScenario, SwitchSetup, SyncProfile, TwoFrameSetup,
};
use chronoframe::clock::ClockModel;
use chronoframe::constraint::{ClockTerm, ConstraintSpec, NullSpace};
use chronoframe::tensor::{self, expm_hermitian_generator, gates, Operator, SpaceLayout};
use chronoframe::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{
    Basis, Experiment, GeneratorConfig, GeneratorPreset, HamiltonianConfig, HamiltonianPreset, InitialState,
    KickConfig, ProfileConfig, ScenarioConfig,
};
use crate::{CheckLevel, RunOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl From<Check> for CheckRecord {
    fn from(c: Check) -> Self {
        Self { name: c.name, value: c.value, limit: c.limit, passed: c.passed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub scenario: String,
    pub experiment: String,
    pub parameters: BTreeMap<String, f64>,
    pub result: Value,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointOutput {
    pub record: Record,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip decimal.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn missing(what: &str, experiment: Experiment) -> Error {
    Error::InvalidArgument(format!("{what} is required for {}", experiment.as_str()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

fn load_matrix(cfg: &ScenarioConfig, file: &Path, layout: SpaceLayout) -> Result<Operator> {
    let path = match &cfg.base_dir {
        Some(dir) if file.is_relative() => dir.join(file),
        _ => file.to_path_buf(),
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let m: MatrixJson =
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let n = layout.dim();
    let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if !shape_ok(&m.re) || !m.im.as_ref().is_none_or(shape_ok) {
        return Err(Error::DimensionMismatch(format!("{}: expected a {n}×{n} matrix", path.display())));
    }
    Ok(Operator::from_fn(layout, |i, j| C64::new(m.re[i][j], m.im.as_ref().map_or(0.0, |im| im[i][j]))))
}

fn system_layout(cfg: &ScenarioConfig) -> Result<SpaceLayout> {
    SpaceLayout::new(cfg.system.factors.iter().map(|f| (f.label.as_str(), f.dim)))
}

fn hamiltonian(cfg: &ScenarioConfig) -> Result<Operator> {
    let layout = system_layout(cfg)?;
    let pair = || -> Result<(&str, &str)> {
        let f = &cfg.system.factors;
        if f.len() < 2 || f[0].dim != 2 || f[1].dim != 2 {
            return Err(Error::InvalidArgument("two-qubit Hamiltonian presets need two qubit factors".into()));
        }
        Ok((f[0].label.as_str(), f[1].label.as_str()))
    };
    let h = match &cfg.system.hamiltonian {
        HamiltonianConfig::Preset(HamiltonianPreset::Zero) => Operator::zeros(layout.clone()),
        HamiltonianConfig::Preset(HamiltonianPreset::Interacting) => {
            let (a, b) = pair()?;
            presets::xx_coupling(a, b)
        }
        HamiltonianConfig::Preset(HamiltonianPreset::Independent) => {
            let (a, b) = pair()?;
            presets::independent_x(a, b)
        }
        HamiltonianConfig::Custom(m) => load_matrix(cfg, &m.file, layout.clone())?,
    };
    h.embed(&layout)?.into_hermitian()
}

fn initial_state(cfg: &ScenarioConfig) -> Result<Vec<C64>> {
    let layout = system_layout(cfg)?;
    let default = if cfg.experiment == Experiment::ReversedOrder { InitialState::Plus } else { InitialState::Zero };
    let mut v = vec![C64::new(0.0, 0.0); layout.dim()];
    match cfg.system.initial.unwrap_or(default) {
        InitialState::Zero => v[0] = C64::new(1.0, 0.0),
        InitialState::Plus => {
            // |+⟩ on the first factor: digit 0 and 1 of the leading factor.
            let stride = layout.dim() / layout.factors()[0].dim;
            v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
            v[stride] = C64::new(FRAC_1_SQRT_2, 0.0);
        }
    }
    Ok(v)
}

fn ancilla(target: &str) -> String {
    format!("{target}p")
}

/// Generator K of a kick; the kick applies e^{-iK}.
fn generator(cfg: &ScenarioConfig, index: usize, seed: u64) -> Result<Operator> {
    let k = &cfg.kicks[index];
    let dim = cfg.system.factors.iter().find(|f| f.label == k.target).map(|f| f.dim).unwrap_or(2);
    let t = k.target.as_str();
    let qubit = || {
        if dim == 2 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("kick `{}` needs a qubit target", k.name())))
        }
    };
    let layout = SpaceLayout::single(t, dim)?;
    match &k.generator {
        GeneratorConfig::Custom(m) => load_matrix(cfg, &m.file, layout)?.into_hermitian(),
        GeneratorConfig::Preset(p) => match p {
            GeneratorPreset::Hadamard => qubit().map(|_| presets::hadamard_generator(t)),
            GeneratorPreset::YMeasurement => qubit().map(|_| presets::y_measurement_generator(t, &ancilla(t))),
            GeneratorPreset::PauliX => qubit().map(|_| presets::pauli_generator(&gates::pauli_x(t))),
            GeneratorPreset::PauliY => qubit().map(|_| presets::pauli_generator(&gates::pauli_y(t))),
            GeneratorPreset::PauliZ => qubit().map(|_| presets::pauli_generator(&gates::pauli_z(t))),
            GeneratorPreset::PhaseS => {
                qubit()?;
                Operator::diagonal(layout, &[0.0, -PI / 2.0])?.into_hermitian()
            }
            GeneratorPreset::Identity => Operator::zeros(layout).into_hermitian(),
            GeneratorPreset::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let n = dim * dim;
                let a: Vec<C64> =
                    (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
                let a = Operator::new(layout, a, false)?;
                a.add(&a.adjoint())?.scale_real(0.5).into_hermitian()
            }
        },
    }
}

fn unitary(cfg: &ScenarioConfig, index: usize, seed: u64) -> Result<Operator> {
    expm_hermitian_generator(&generator(cfg, index, seed)?, 1.0)
}

fn is_dilation(k: &KickConfig) -> bool {
    matches!(k.generator, GeneratorConfig::Preset(GeneratorPreset::YMeasurement))
}

fn choice(cfg: &ScenarioConfig, index: usize, seed: u64) -> Result<InterventionChoice> {
    let u = unitary(cfg, index, seed)?;
    let name = cfg.kicks[index].name();
    if is_dilation(&cfg.kicks[index]) {
        InterventionChoice::dilated(name, u)
    } else {
        InterventionChoice::unitary(name, u)
    }
}

fn measurement(cfg: &ScenarioConfig) -> Result<(MeasurementSpec, Basis)> {
    let m = cfg.measurement.as_ref().ok_or_else(|| missing("[measurement]", cfg.experiment))?;
    let t = m.target.as_str();
    let h = FRAC_1_SQRT_2;
    let (plus, minus) = match m.basis {
        Basis::Y => return Ok((MeasurementSpec::pauli_y(t), m.basis)),
        Basis::X => ([C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]),
        Basis::Z => ([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
    };
    let spec = MeasurementSpec::new(vec![(1.0, gates::projector(t, &plus)), (-1.0, gates::projector(t, &minus))])?;
    Ok((spec, m.basis))
}

fn t_f(cfg: &ScenarioConfig) -> Result<f64> {
    cfg.times.t_f.ok_or_else(|| missing("times.t_f", cfg.experiment))
}

fn profile(cfg: &ScenarioConfig) -> Result<ProfileConfig> {
    cfg.profile.ok_or_else(|| missing("[profile]", cfg.experiment))
}

/// Two-clock experiments use clocks `C1` and `C2` on a shared grid.
fn two_clock_grid(cfg: &ScenarioConfig) -> Result<(usize, f64)> {
    let ok = cfg.clocks.len() == 2
        && cfg.clocks[0].label == "C1"
        && cfg.clocks[1].label == "C2"
        && cfg.clocks[0].d == cfg.clocks[1].d
        && cfg.clocks[0].dt() == cfg.clocks[1].dt();
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "{} needs clocks `C1` and `C2` with equal d and dt",
            cfg.experiment.as_str()
        )));
    }
    Ok((cfg.clocks[0].d, cfg.clocks[0].dt()))
}

fn kick_on<'a>(cfg: &'a ScenarioConfig, index: usize, clock: &str) -> Result<&'a KickConfig> {
    let k = cfg.kicks.get(index).ok_or_else(|| missing(&format!("kicks[{index}]"), cfg.experiment))?;
    if k.clock != clock {
        return Err(Error::InvalidArgument(format!("kicks[{index}] must be timed by `{clock}`")));
    }
    Ok(k)
}

fn group_average_check(clocks: Vec<ClockModel>, h: &Operator, phi0: &[C64]) -> Result<Check> {
    let spec = ConstraintSpec::new(clocks.iter().cloned().map(ClockTerm::new).collect(), h.clone())?;
    let ns = NullSpace::new(&spec)?;
    let mut rest = phi0.to_vec();
    for c in clocks.iter().skip(1).rev() {
        rest = c.time_state(0).iter().flat_map(|a| rest.iter().map(move |b| a * b)).collect();
    }
    let kin = tensor::insert_factor(spec.layout(), clocks[0].label(), &clocks[0].time_state(0), &rest)?;
    let p = ns.project(&kin);
    let g = ns.group_average(&kin, 4 * clocks.len() * clocks[0].dim())?;
    let fid = tensor::inner(&p, &g).norm_sqr() / (tensor::norm(&p).powi(2) * tensor::norm(&g).powi(2));
    Ok(Check::at_most("group average vs projector (1 - fidelity)", 1.0 - fid, 1e-8))
}

fn dist_json(d: &Distribution) -> Value {
    json!({ "outcomes": d.outcomes, "probs": d.probs })
}

fn plus(d: &Distribution) -> f64 {
    d.prob(1.0).unwrap_or(f64::NAN)
}

struct Parts {
    parameters: BTreeMap<String, f64>,
    result: Value,
    checks: Vec<Check>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn run_point(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<PointOutput> {
    let parts = match cfg.experiment {
        Experiment::Signaling => signaling(cfg, opts)?,
        Experiment::NaiveDemo => naive(cfg, opts)?,
        Experiment::ReversedOrder => reversed(cfg, opts)?,
        Experiment::SyncScan => sync(cfg)?,
        Experiment::Switch => switch(cfg, opts)?,
        Experiment::TwoFrame => two_frame(cfg, opts)?,
    };
    let checks: Vec<CheckRecord> = parts.checks.into_iter().map(CheckRecord::from).collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(PointOutput {
        record: Record {
            scenario: cfg.name.clone(),
            experiment: cfg.experiment.as_str().to_string(),
            parameters: parts.parameters,
            result: parts.result,
            checks,
            passed,
        },
        columns: parts.columns,
        rows: parts.rows,
    })
}

/// Cross-point columns.
pub fn finish(experiment: Experiment, outs: &mut [PointOutput]) {
    if experiment != Experiment::SyncScan || outs.is_empty() {
        return;
    }
    let first = outs[0].record.result["norm"].as_f64().unwrap_or(f64::NAN);
    for o in outs.iter_mut() {
        let ratio = o.record.result["norm"].as_f64().unwrap_or(f64::NAN) / first;
        o.record.result["ratio"] = json!(ratio);
        o.columns.push("ratio".into());
        for r in &mut o.rows {
            r.push(num(ratio));
        }
    }
}

fn signaling(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Parts> {
    let clock = cfg.clocks[0].build()?;
    let t_f = t_f(cfg)?;
    if cfg.kicks.is_empty() {
        return Err(missing("at least one kick", cfg.experiment));
    }
    let t_i = cfg.kicks[0].tau;
    if cfg.kicks.iter().any(|k| k.tau != t_i || k.clock != clock.label()) {
        return Err(Error::InvalidArgument("signaling kicks are alternatives: same clock and tau".into()));
    }
    let (m, basis) = measurement(cfg)?;
    let sc = SignalingScenario {
        clock: clock.clone(),
        system: hamiltonian(cfg)?,
        initial: initial_state(cfg)?,
        t_i,
        t_f,
        readout: cfg.times.readout,
    };
    let mut choices = vec![InterventionChoice::none("none")];
    for i in 0..cfg.kicks.len() {
        choices.push(choice(cfg, i, opts.seed)?);
    }
    let report = compare_interventions(&sc, &choices, &m, None)?;
    let mut checks = report.checks.clone();
    if opts.check_level == CheckLevel::Full {
        for c in &choices {
            let name = format!("{}: constraint path vs born rule", c.label);
            let check = match constraint_path_distribution(&sc, c, &m) {
                Ok(p) => Check::at_most(name, p.max_abs_diff(&born_rule_distribution(&sc, c, &m)?), 1e-3),
                Err(Error::NotCommensurate | Error::NoPhysicalStates(_)) => Check::at_most(name, f64::INFINITY, 1e-3),
                Err(e) => return Err(e),
            };
            checks.push(check);
        }
        checks.push(group_average_check(vec![clock], &sc.system, &sc.initial)?);
    }
    let mut columns = vec!["t_f".to_string()];
    let mut row = vec![num(t_f)];
    let mut dists = serde_json::Map::new();
    for c in &report.choices {
        columns.push(format!("p_plus_{}_{}", basis.as_str(), c.label));
        row.push(num(plus(&c.distribution)));
        dists.insert(c.label.clone(), dist_json(&c.distribution));
    }
    Ok(Parts {
        parameters: BTreeMap::from([("t_f".into(), t_f), ("t_i".into(), t_i)]),
        result: json!({
            "distributions": dists,
            "max_tv_distance": report.max_tv_distance,
            "max_trace_distance": report.max_trace_distance,
            "threshold": report.threshold,
            "verdict": report.verdict.as_str(),
        }),
        checks,
        columns,
        rows: vec![row],
    })
}

fn naive(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Parts> {
    let (d, dt) = two_clock_grid(cfg)?;
    let k = kick_on(cfg, 0, "C1")?;
    let t_f = t_f(cfg)?;
    let (m, _) = measurement(cfg)?;
    let setup = NaiveSetup {
        d,
        period: d as f64 * dt,
        system: hamiltonian(cfg)?,
        operation: unitary(cfg, 0, opts.seed)?,
        measurement: m,
        profile: profile(cfg)?.kind(),
        initial: initial_state(cfg)?,
        t_i: k.tau,
        t_f,
    };
    let r = naive_embedding_demo(&setup)?;
    let mut checks = r.checks.clone();
    if opts.check_level == CheckLevel::Full {
        let clocks = vec![cfg.clocks[0].build()?, cfg.clocks[1].build()?];
        checks.push(group_average_check(clocks, &setup.system, &setup.initial)?);
    }
    let columns = ["t_f", "frame", "factor", "support", "p_plus"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for (frame, supports, p) in [("C1", &r.frame1, &r.p_frame1), ("C2", &r.frame2, &r.p_frame2)] {
        for (factor, s) in supports {
            rows.push(vec![num(t_f), frame.into(), factor.clone(), num(*s), num(plus(p))]);
        }
    }
    let supports =
        |v: &Vec<(String, f64)>| v.iter().map(|(l, s)| (l.clone(), json!(s))).collect::<serde_json::Map<_, _>>();
    Ok(Parts {
        parameters: BTreeMap::from([("t_f".into(), t_f), ("t_i".into(), k.tau)]),
        result: json!({
            "supports": { "C1": supports(&r.frame1), "C2": supports(&r.frame2) },
            "bulk_levels": r.bulk_levels,
            "distributions": { "C1": dist_json(&r.p_frame1), "C2": dist_json(&r.p_frame2) },
        }),
        checks,
        columns,
        rows,
    })
}

fn reversed(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Parts> {
    let (d, dt) = two_clock_grid(cfg)?;
    if cfg.kicks.len() != 2 || cfg.kicks[0].target != cfg.kicks[1].target {
        return Err(Error::InvalidArgument("reversed_order needs two kicks (U_A, U_B) on the same factor".into()));
    }
    if cfg.system.factors.len() != 1 || cfg.system.factors[0].label != cfg.kicks[0].target {
        return Err(Error::InvalidArgument("reversed_order needs the kick target as the only system factor".into()));
    }
    let sigma = match profile(cfg)? {
        ProfileConfig::Gaussian { center: 0.0, sigma } => sigma,
        _ => return Err(Error::InvalidArgument("reversed_order needs a centred gaussian profile".into())),
    };
    let period = d as f64 * dt;
    let delta_tau = cfg.times.delta_tau.unwrap_or(period / 4.0);
    cfg.clocks[0].build()?.grid_index(delta_tau)?;
    let setup = ReversedSetup {
        u_a: unitary(cfg, 0, opts.seed)?,
        u_b: unitary(cfg, 1, opts.seed)?,
        initial: initial_state(cfg)?,
        d,
        period,
        delta_tau,
        sigma,
    };
    let r = reversed_clock_ordering(&setup)?;
    let checks = vec![Check::at_most("C1 path reproduces U_B U_A", r.distance_c1, 1e-8)];
    Ok(Parts {
        parameters: BTreeMap::from([("sigma".into(), sigma), ("delta_tau".into(), delta_tau)]),
        result: json!({ "distance_c1": r.distance_c1, "distance_c2": r.distance }),
        checks,
        columns: ["sigma", "distance_c1", "distance_c2"].map(String::from).to_vec(),
        rows: vec![vec![num(sigma), num(r.distance_c1), num(r.distance)]],
    })
}

fn sync(cfg: &ScenarioConfig) -> Result<Parts> {
    let (d, dt) = two_clock_grid(cfg)?;
    let period = d as f64 * dt;
    let (profile, name, sigma) = match profile(cfg)? {
        ProfileConfig::Kronecker { center: 0.0 } => (SyncProfile::Kronecker, "kronecker", 0.0),
        ProfileConfig::Gaussian { center: 0.0, sigma } => (SyncProfile::Gaussian { sigma }, "gaussian", sigma),
        _ => return Err(Error::InvalidArgument("sync_scan needs a centred kronecker or gaussian profile".into())),
    };
    let norm = sync_physical_norm(d, period, profile)?;
    let single = single_clock_physical_norm(d, period)?;
    Ok(Parts {
        parameters: BTreeMap::from([("d".into(), d as f64)]),
        result: json!({ "profile": name, "sigma": sigma, "norm": norm, "single_clock_norm": single }),
        checks: vec![Check::at_most("single-clock norm is one", (single - 1.0).abs(), 1e-10)],
        columns: ["d", "profile", "sigma", "norm"].map(String::from).to_vec(),
        rows: vec![vec![d.to_string(), name.into(), num(sigma), num(norm)]],
    })
}

fn switch(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Parts> {
    let (d, dt) = two_clock_grid(cfg)?;
    let a = kick_on(cfg, 0, "C1")?;
    let b = kick_on(cfg, 1, "C2")?;
    let setup = SwitchSetup {
        d,
        dt,
        system: hamiltonian(cfg)?,
        u_a: unitary(cfg, 0, opts.seed)?,
        u_b: unitary(cfg, 1, opts.seed)?,
        tau_a: a.tau,
        tau_b: b.tau,
        profile: profile(cfg)?.kind(),
        initial: initial_state(cfg)?,
        readout: cfg.times.readout,
    };
    let r = quantum_switch_scenario(&setup)?;
    let columns = [
        "tau_b",
        "frame",
        "verdict",
        "weight_early",
        "weight_late",
        "a_then_b",
        "b_then_a",
        "overlap_re",
        "overlap_im",
        "interference",
    ]
    .map(String::from)
    .to_vec();
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let mut rows = Vec::new();
    let mut frames = serde_json::Map::new();
    for f in &r.frames {
        let w = |b| f.order_weights.iter().find(|(o, _)| *o == b).map_or(0.0, |x| x.1);
        let a_then_b = w(chronoframe::intervention::Branch::AThenB);
        let b_then_a = w(chronoframe::intervention::Branch::BThenA);
        rows.push(vec![
            num(b.tau),
            f.clock.clone(),
            f.verdict.as_str().into(),
            num(f.windows[0].weight),
            opt(f.windows.get(1).map(|w| w.weight)),
            num(a_then_b),
            num(b_then_a),
            opt(f.branch_overlap.map(|z| z.re)),
            opt(f.branch_overlap.map(|z| z.im)),
            opt(f.interference),
        ]);
        let windows: Vec<Value> = f
            .windows
            .iter()
            .map(|w| json!({ "peak": w.peak, "weight": w.weight, "order": w.order.as_str(), "purity": w.purity }))
            .collect();
        frames.insert(
            f.clock.clone(),
            json!({
                "tau": f.tau,
                "verdict": f.verdict.as_str(),
                "branch_weights": f.windows.iter().map(|w| w.weight).collect::<Vec<_>>(),
                "order_weights": { "a_then_b": a_then_b, "b_then_a": b_then_a },
                "windows": windows,
                "branch_overlap": f.branch_overlap.map(|z| [z.re, z.im]),
                "interference": f.interference,
            }),
        );
    }
    Ok(Parts {
        parameters: BTreeMap::from([("tau_a".into(), a.tau), ("tau_b".into(), b.tau)]),
        result: json!({ "frames": frames, "order_threshold": r.threshold, "threshold_is_convention": true }),
        checks: r.checks,
        columns,
        rows,
    })
}

fn two_frame(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Parts> {
    let (d, dt) = two_clock_grid(cfg)?;
    let a = kick_on(cfg, 0, "C1")?;
    let b = kick_on(cfg, 1, "C2")?;
    let (m, basis) = measurement(cfg)?;
    let target = &cfg.measurement.as_ref().expect("checked by measurement()").target;
    if !is_dilation(b) || &b.target != target || basis != Basis::Y {
        return Err(Error::InvalidArgument(
            "two_frame needs kicks[1] = y_measurement on the measured factor, with a y-basis measurement".into(),
        ));
    }
    let setup = TwoFrameSetup {
        d,
        dt,
        system: hamiltonian(cfg)?,
        intervention: unitary(cfg, 0, opts.seed)?,
        measurement: m,
        tau_a: a.tau,
        tau_b: b.tau,
        profile: profile(cfg)?.kind(),
        initial: initial_state(cfg)?,
    };
    let r = two_frame_causal_consistency(&setup)?;
    let columns =
        ["tau_b", "frame", "order", "order_weight", "delocalized", "spread", "p_plus", "p_single_plus", "deviation"]
            .map(String::from)
            .to_vec();
    let single = plus(&r.single_clock);
    let mut rows = Vec::new();
    let mut frames = serde_json::Map::new();
    for f in &r.frames {
        let p = plus(&f.distribution);
        rows.push(vec![
            num(b.tau),
            f.clock.clone(),
            f.order.as_str().into(),
            num(f.order_weight),
            f.delocalized.0.clone(),
            num(f.delocalized.1),
            num(p),
            num(single),
            num((p - single).abs()),
        ]);
        frames.insert(
            f.clock.clone(),
            json!({
                "order": f.order.as_str(),
                "order_weight": f.order_weight,
                "delocalized": { "operation": f.delocalized.0, "spread": f.delocalized.1 },
                "distribution": dist_json(&f.distribution),
            }),
        );
    }
    Ok(Parts {
        parameters: BTreeMap::from([("tau_a".into(), a.tau), ("tau_b".into(), b.tau)]),
        result: json!({ "readout": r.readout, "frames": frames, "single_clock": dist_json(&r.single_clock) }),
        checks: r.checks,
        columns,
        rows,
    })
}
