//! Command-line front end: `synth`, `verify`, `simulate`, `sweep`.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or parse error.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::spinbath::{DecouplingModel, DEFAULT_DIMENSION_CAP};
use commands::{SimulateArgs, Status, SweepArgs, SynthArgs, VerifyArgs};
use config::{ErrorModelConfig, OneOrMany};

pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "dcg", version, about = "Dynamically corrected gates: synthesis, verification and spin-bath experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize an EDD, DCG or drift-compensating schedule.
    Synth {
        /// Decoupling group: linear (Z2xZ2) or dephasing (Z2).
        #[arg(long, default_value = "linear", value_parser = parse_model)]
        model: DecouplingModel,
        /// Target gate, kind:qubits[:theta], e.g. x:1:pi/4 or heisenberg:1,2:pi/8.
        #[arg(long)]
        gate: Option<String>,
        /// Plain EDD implementing the identity.
        #[arg(long)]
        noop: bool,
        /// Always-on drift model (heisenberg) for chain blocks.
        #[arg(long)]
        drift: Option<String>,
        /// 1-based index k of the entangled pair (k, k+1) under drift.
        #[arg(long)]
        pair: Option<usize>,
        /// Heisenberg drift strength.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Register size; defaults to the gate's span, or 4 under drift.
        #[arg(long)]
        n: Option<usize>,
        /// Minimum switching time.
        #[arg(long, default_value_t = 0.01)]
        tau: f64,
        /// Output path stem; writes STEM.sched and STEM.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cancellation, bound, balance-pair and No-Go suites on a schedule.
    Verify {
        schedule: PathBuf,
        #[arg(long, default_value = "linear")]
        subspace: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        seed: u64,
        /// Bath qubits used for the random error operators.
        #[arg(long, default_value_t = 2)]
        bath_qubits: usize,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a schedule through a sampled spin bath and report its fidelity.
    Simulate {
        schedule: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long = "n-b", default_value_t = 4)]
        n_b: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Target gate; the ideal schedule product when omitted.
        #[arg(long)]
        gate: Option<String>,
        /// Fixed systematic control error strength.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_DIMENSION_CAP)]
        dimension_cap: usize,
        /// Directory for the report and its argument snapshot.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a primitive-vs-DCG parameter sweep from a TOML or JSON config.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory, overriding the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seeds replacing the config's list.
        #[arg(long = "seed")]
        seeds: Vec<u64>,
    },
}

fn parse_model(s: &str) -> Result<DecouplingModel, String> {
    match s {
        "linear" => Ok(DecouplingModel::Linear),
        "dephasing" => Ok(DecouplingModel::Dephasing),
        other => Err(format!("unknown model {other:?}; expected linear or dephasing")),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> crate::Result<String> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    print!("{text}");
    Ok(text)
}

fn dispatch(command: Command) -> crate::Result<Status> {
    match command {
        Command::Synth { model, gate, noop, drift, pair, lambda, n, tau, out } => {
            let s = commands::cmd_synth(&SynthArgs { model, gate, noop, drift, pair, lambda, n, tau, out })?;
            let layers: Vec<String> = s.segments_per_layer.iter().map(|(l, c)| format!("{l}:{c}")).collect();
            println!("schedule {}", s.schedule_id);
            println!("qubits {}", s.n_qubits);
            println!("segments {} (per layer {})", s.segments, layers.join(" "));
            println!("duration_multiplier {}", s.duration_multiplier);
            println!("wrote {} {}", s.text_path.display(), s.json_path.display());
            Ok(Status::Pass)
        }
        Command::Verify { schedule, subspace, samples, tol, seed, bath_qubits, out } => {
            let report = commands::cmd_verify(&VerifyArgs { schedule, subspace, samples, tol, seed, bath_qubits })?;
            let text = print_json(&report)?;
            if let Some(path) = out {
                std::fs::write(path, text)?;
            }
            Ok(if report.pass { Status::Pass } else { Status::Fail })
        }
        Command::Simulate { schedule, seed, n_b, gamma, a, gate, epsilon, dimension_cap, out } => {
            let error_model = if epsilon == 0.0 {
                ErrorModelConfig::default()
            } else {
                ErrorModelConfig { kind: "fixed_systematic".into(), epsilon: OneOrMany::One(epsilon), ..Default::default() }
            };
            let args = SimulateArgs { schedule, seed, n_b, gamma, a, gate, error_model, dimension_cap, out };
            print_json(&commands::cmd_simulate(&args)?)?;
            Ok(Status::Pass)
        }
        Command::Sweep { config, jobs, out, seeds } => {
            let files = commands::cmd_sweep(&SweepArgs { config, jobs, out, seeds })?;
            for c in &files.output.summary.curves {
                let fit = c.fit.as_ref().map_or("no fit".to_string(), |f| {
                    format!("slope {:.4} +- {:.4} over {} points", f.slope, f.slope_stderr, f.points)
                });
                let star = c.tau_star.map_or("none".to_string(), |t| format!("{t:.4e}"));
                println!("seed {} Gamma {} A {} epsilon {}: {fit}, tau* {star}", c.seed, c.gamma, c.a, c.epsilon);
            }
            println!("wrote {} {} {}", files.csv.display(), files.summary.display(), files.config.display());
            Ok(Status::Pass)
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
