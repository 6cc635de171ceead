//! Subcommand implementations. Each returns a [`Status`]; errors map to exit
//! code 2 in [`super::run`].

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ErrorModelConfig, ExperimentConfig, GateConfig};
use crate::analysis::{
    exact_error_action, first_order_magnus, nogo_witness, second_order_bound, verify_first_order_cancellation,
    CancellationReport, ErrorSubspace,
};
use crate::drift::{single_qubit_drift_dcg, two_qubit_drift_dcg, ChainModel};
use crate::error::{Error, Result};
use crate::group::Role;
use crate::operator::random::unit_hermitian;
use crate::operator::{DenseOperator, JointSpace, Pauli};
use crate::schedule::ControlSchedule;
use crate::spinbath::{
    apply_control_error, dcg_schedule, edd_schedule, gate_fidelity, run_sweep, sample_bath_model, to_csv,
    DecouplingModel, GateSpec, SpinBathSimulator,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Reads a schedule in JSON (`.json`) or line text form.
pub fn load_schedule(path: &Path) -> Result<ControlSchedule> {
    let text = fs::read_to_string(path)?;
    let sched = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?
    } else {
        ControlSchedule::from_text(&text)?
    };
    sched.validate()?;
    Ok(sched)
}

// ---------------------------------------------------------------- synth

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthArgs {
    pub model: DecouplingModel,
    pub gate: Option<String>,
    pub noop: bool,
    pub drift: Option<String>,
    /// 1-based pair index for the entangling drift block.
    pub pair: Option<usize>,
    pub lambda: f64,
    pub n: Option<usize>,
    pub tau: f64,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub schedule_id: String,
    pub n_qubits: usize,
    pub segments: usize,
    pub segments_per_layer: Vec<(u8, usize)>,
    pub duration_multiplier: f64,
    pub text_path: PathBuf,
    pub json_path: PathBuf,
}

pub fn build_synth_schedule(args: &SynthArgs) -> Result<ControlSchedule> {
    let gate = args.gate.as_deref().map(GateConfig::parse).transpose()?;
    if args.noop == gate.is_some() && args.drift.is_none() {
        return Err(Error::InvalidArgument("give exactly one of --gate and --noop".into()));
    }
    match args.drift.as_deref() {
        None => {
            if args.pair.is_some() {
                return Err(Error::InvalidArgument("--pair needs --drift heisenberg".into()));
            }
            let n = args.n.unwrap_or_else(|| gate.as_ref().map_or(1, GateConfig::min_qubits));
            match gate {
                Some(g) => dcg_schedule(args.model, &g.to_gate()?, n, args.tau),
                None => edd_schedule(args.model, n, args.tau),
            }
        }
        Some("heisenberg") => {
            let n = args.n.unwrap_or(4);
            let chain = ChainModel::new(n, args.lambda)?;
            match (args.pair, gate) {
                (Some(k), None) if k >= 1 => Ok(two_qubit_drift_dcg(&chain, k - 1, args.tau)?.schedule),
                (None, Some(g)) => match g.to_gate()? {
                    GateSpec::Rotation { qubit, axis: axis @ (Pauli::X | Pauli::Y), theta } => {
                        Ok(single_qubit_drift_dcg(&chain, qubit, theta, axis, args.tau)?.schedule)
                    }
                    _ => Err(Error::InvalidArgument("drift single-qubit blocks take x or y rotations".into())),
                },
                _ => Err(Error::InvalidArgument("--drift heisenberg needs either --pair K (K >= 1) or an x/y --gate".into())),
            }
        }
        Some(other) => Err(Error::InvalidArgument(format!("unknown drift model {other:?}"))),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<SynthSummary> {
    let sched = build_synth_schedule(args)?;
    let stem = args.out.clone().unwrap_or_else(|| PathBuf::from(sanitize(&sched.id)));
    let text_path = stem.with_extension("sched");
    let json_path = stem.with_extension("json");
    write(&text_path, &sched.to_text())?;
    write(&json_path, &(serde_json::to_string_pretty(&sched)? + "\n"))?;
    let segments_per_layer =
        sched.layers().into_iter().map(|l| (l, sched.segments.iter().filter(|s| s.layer == l).count())).collect();
    Ok(SynthSummary {
        schedule_id: sched.id.clone(),
        n_qubits: sched.n_qubits,
        segments: sched.segments.len(),
        segments_per_layer,
        duration_multiplier: sched.total_multiplier(),
        text_path,
        json_path,
    })
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    pub schedule: PathBuf,
    pub subspace: String,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub bath_qubits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples: usize,
    /// Largest `‖Φ − Φ^{[1]}‖ / bound`.
    pub worst_ratio: f64,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub samples: usize,
    /// Largest `‖Φ^{[1]}_{Q'Q} − Φ^{[1]}_{Q_half}‖ / (‖H_e‖·T_{Q_half})`.
    pub worst_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoGoSummary {
    pub cases: usize,
    pub all_vanish: bool,
    pub consistent: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schedule_id: String,
    pub subspace: String,
    pub samples: usize,
    pub worst_residual: f64,
    pub pass: bool,
    pub cancellation: CancellationReport,
    pub bound: BoundReport,
    /// Absent when the schedule has no identity arm and Q_half.
    pub balance: Option<BalanceReport>,
    pub nogo: NoGoSummary,
}

/// Second-order bound on random `H_SB + H_B` with `‖H_e‖T` drawn in (0.1, 0.5].
pub fn bound_suite(
    schedule: &ControlSchedule,
    subspace: &ErrorSubspace,
    space: JointSpace,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<BoundReport> {
    let t = schedule.duration();
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..samples {
        let h_sb = subspace.sample(space, rng)?;
        let h_b = DenseOperator::lift_bath(space, &unit_hermitian(rng, space.bath_dimension()))?;
        let total = h_sb.add(&h_b);
        let target = rng.random_range(0.1..=0.5);
        let scale = target / (total.operator_norm() * t);
        let (h_sb, h_b) = (h_sb.scale_real(scale), h_b.scale_real(scale));
        let h_e = h_sb.add(&h_b);
        let exact = exact_error_action(schedule, &h_e)?;
        let first = first_order_magnus(schedule, &h_e)?;
        let dev = exact.phi.sub(&first.phi).operator_norm();
        let bound = second_order_bound(h_sb.operator_norm(), h_b.operator_norm(), t);
        let ratio = dev / bound;
        if ratio > 1.0 {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    Ok(BoundReport { samples, worst_ratio: worst, violations, pass: violations == 0 })
}

fn sub_schedule(schedule: &ControlSchedule, indices: &[usize], id: &str) -> Result<ControlSchedule> {
    let mut out = ControlSchedule::new(id, schedule.n_qubits, schedule.tau)?;
    out.gating_drift = schedule.gating_drift.clone();
    for &i in indices {
        out.segments.push(schedule.segments[i].clone());
    }
    Ok(out)
}

/// Indices of the first identity arm `Q'Q` and of all Q_half segments.
pub fn balance_segments(schedule: &ControlSchedule) -> Option<(Vec<usize>, Vec<usize>)> {
    let start = schedule.segments.iter().position(|s| s.role == Role::IdentityArm)?;
    let mut arm = Vec::new();
    let mut seen_reverse = false;
    for (i, s) in schedule.segments.iter().enumerate().skip(start) {
        if s.role != Role::IdentityArm || (seen_reverse && s.token == "Q") {
            break;
        }
        seen_reverse |= s.token == "Q'";
        arm.push(i);
    }
    let half: Vec<usize> = schedule.segments.iter().enumerate().filter(|(_, s)| s.role == Role::QHalf).map(|(i, _)| i).collect();
    (!half.is_empty() && seen_reverse).then_some((arm, half))
}

pub fn balance_suite(
    schedule: &ControlSchedule,
    subspace: &ErrorSubspace,
    space: JointSpace,
    samples: usize,
    tol: f64,
    rng: &mut impl Rng,
) -> Result<Option<BalanceReport>> {
    let Some((arm, half)) = balance_segments(schedule) else {
        return Ok(None);
    };
    let arm = sub_schedule(schedule, &arm, "identity_arm")?;
    let half = sub_schedule(schedule, &half, "q_half")?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let h_e = subspace.sample(space, rng)?;
        let a = first_order_magnus(&arm, &h_e)?.phi;
        let b = first_order_magnus(&half, &h_e)?.phi;
        worst = worst.max(a.sub(&b).operator_norm() / (h_e.operator_norm() * half.duration()));
    }
    Ok(Some(BalanceReport { samples, worst_residual: worst, pass: worst < tol }))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<VerifyReport> {
    if args.samples == 0 {
        return Err(Error::InvalidArgument("--samples must be positive".into()));
    }
    let sched = load_schedule(&args.schedule)?;
    let subspace = ErrorSubspace::by_name(&args.subspace, sched.n_qubits)?;
    let space = JointSpace::new(sched.n_qubits, 1 << args.bath_qubits)?;
    let cancellation = verify_first_order_cancellation(&sched, &subspace, space, args.samples, args.tol, args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let bound = bound_suite(&sched, &subspace, space, args.samples, &mut rng)?;
    let balance = balance_suite(&sched, &subspace, space, args.samples, args.tol, &mut rng)?;
    let gates = sched.interval_unitaries()?;
    let nogo = nogo_witness(&gates, &subspace, space, 2, &mut rng)?;
    let nogo = NoGoSummary { cases: nogo.cases.len(), all_vanish: nogo.all_vanish, consistent: nogo.consistent, pass: nogo.consistent };
    let pass = cancellation.pass && bound.pass && balance.as_ref().is_none_or(|b| b.pass) && nogo.pass;
    Ok(VerifyReport {
        schedule_id: sched.id.clone(),
        subspace: subspace.name.clone(),
        samples: args.samples,
        worst_residual: cancellation.worst_residual,
        pass,
        cancellation,
        bound,
        balance,
        nogo,
    })
}

// ---------------------------------------------------------------- simulate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    pub schedule: PathBuf,
    pub seed: u64,
    pub n_b: usize,
    pub gamma: f64,
    pub a: f64,
    /// Target gate; the closed-system schedule product when absent.
    pub gate: Option<String>,
    pub error_model: ErrorModelConfig,
    pub dimension_cap: usize,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub schedule_id: String,
    pub seed: u64,
    #[serde(rename = "n_B")]
    pub n_b: usize,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub epsilon: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub unitarity_residual: f64,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateReport> {
    let sched = load_schedule(&args.schedule)?;
    let model = sample_bath_model(sched.n_qubits, args.n_b, args.gamma, args.a, args.seed, args.dimension_cap)?;
    let target = match &args.gate {
        Some(g) => GateConfig::parse(g)?.to_gate()?.target_unitary(sched.n_qubits)?,
        None => sched.gate_unitary()?,
    };
    let errmodel = args.error_model.to_model(sched.n_qubits)?;
    let sim = SpinBathSimulator::new(&model)?;
    let evo = sim.evolve(&apply_control_error(&sched, &errmodel)?)?;
    let fidelity = gate_fidelity(&evo.rho_system, &target, sim.input_state())?;
    let report = SimulateReport {
        schedule_id: sched.id.clone(),
        seed: args.seed,
        n_b: args.n_b,
        gamma: args.gamma,
        a: args.a,
        epsilon: errmodel.epsilon(),
        fidelity,
        infidelity: 1.0 - fidelity,
        unitarity_residual: evo.unitarity_residual,
    };
    if let Some(dir) = &args.out {
        write(&dir.join("simulate.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
        write(&dir.join("config.json"), &(serde_json::to_string_pretty(args)? + "\n"))?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- sweep

#[derive(Clone, Debug, PartialEq)]
pub struct SweepArgs {
    pub config: PathBuf,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFiles {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub config: PathBuf,
    pub output: crate::spinbath::SweepOutput,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepFiles> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if !args.seeds.is_empty() {
        cfg.seeds = args.seeds.clone();
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    let dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| Error::InvalidArgument("no output directory: set output_dir or pass --out".into()))?;
    let sweep = cfg.to_sweep()?;
    let output = run_sweep(&sweep, args.jobs.max(1))?;
    let files = SweepFiles {
        csv: dir.join("results.csv"),
        summary: dir.join("summary.json"),
        config: dir.join("config.json"),
        output,
    };
    write(&files.config, &cfg.to_json()?)?;
    write(&files.csv, &to_csv(&files.output.rows))?;
    write(&files.summary, &(serde_json::to_string_pretty(&files.output.summary)? + "\n"))?;
    Ok(files)
}
