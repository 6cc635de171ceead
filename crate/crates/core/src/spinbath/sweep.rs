use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::control_error::ControlErrorModel;
use super::gates::GateSpec;
use super::model::{sample_bath_model, DEFAULT_DIMENSION_CAP};
use super::simulate::{run_point, SimulationResult, INFIDELITY_FLOOR};
use crate::error::{Error, Result};

/// Relative deviation of local slopes tolerated by the automatic fit window.
pub const AUTO_WINDOW_TOL: f64 = 0.15;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitWindowPolicy {
    /// Largest contiguous low-τ run whose local slopes stay within 15% of the
    /// slope between the two smallest usable τ.
    #[default]
    Auto,
    All,
    Explicit { tau_min: f64, tau_max: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub n_b: usize,
    pub gamma: Vec<f64>,
    pub a: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub gate: GateSpec,
    /// Kind and extra parameters; strengths come from `epsilons`.
    pub error_model: ControlErrorModel,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub fit_window_policy: FitWindowPolicy,
    pub dimension_cap: usize,
    /// Points with DCG infidelity below this are left out of fits.
    pub min_infidelity: f64,
}

impl SweepConfig {
    pub fn new(n: usize, n_b: usize, gate: GateSpec, tau_grid: Vec<f64>, seeds: Vec<u64>) -> Self {
        SweepConfig {
            n,
            n_b,
            gamma: vec![1.0],
            a: vec![1.0],
            tau_grid,
            gate,
            error_model: ControlErrorModel::None,
            epsilons: vec![0.0],
            seeds,
            fit_window_policy: FitWindowPolicy::Auto,
            dimension_cap: DEFAULT_DIMENSION_CAP,
            min_infidelity: INFIDELITY_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Error::InvalidArgument(format!("empty {what} grid"));
        if self.tau_grid.is_empty() {
            return Err(empty("tau"));
        }
        if self.gamma.is_empty() {
            return Err(empty("Gamma"));
        }
        if self.a.is_empty() {
            return Err(empty("A"));
        }
        if self.epsilons.is_empty() {
            return Err(empty("epsilon"));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument(format!("tau {t} must be positive")));
        }
        Ok(())
    }

    /// Grid in emission order: seed, Gamma, A, epsilon, tau (fastest).
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &seed in &self.seeds {
            for &gamma in &self.gamma {
                for &a in &self.a {
                    for &epsilon in &self.epsilons {
                        for &tau in &self.tau_grid {
                            out.push(GridPoint { seed, gamma, a, epsilon, tau });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub seed: u64,
    pub gamma: f64,
    pub a: f64,
    pub epsilon: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Exponent `p` in `r ∝ τ^(−p)`.
    pub slope: f64,
    pub slope_stderr: f64,
    pub points: usize,
    pub tau_min: f64,
    pub tau_max: f64,
}

/// Least-squares fit of `log r` against `log τ`; needs two points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let stderr = if points.len() > 2 {
        let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - b * (x - mx)).powi(2)).sum();
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let taus = points.iter().map(|p| p.0);
    Some(SlopeFit {
        slope: -b,
        slope_stderr: stderr,
        points: points.len(),
        tau_min: taus.clone().fold(f64::INFINITY, f64::min),
        tau_max: taus.fold(0.0, f64::max),
    })
}

/// Prefix (by ascending τ) selected by the automatic window rule.
pub fn auto_window(sorted: &[(f64, f64)]) -> &[(f64, f64)] {
    if sorted.len() < 3 {
        return sorted;
    }
    let local = |i: usize| -((sorted[i + 1].1.ln() - sorted[i].1.ln()) / (sorted[i + 1].0.ln() - sorted[i].0.ln()));
    let reference = local(0);
    let mut end = 2;
    while end < sorted.len() {
        let s = local(end - 1);
        if (s - reference).abs() > AUTO_WINDOW_TOL * reference.abs() {
            break;
        }
        end += 1;
    }
    &sorted[..end]
}

/// Crossing τ where `r` first exceeds 1 going from large to small τ,
/// interpolated in log-log coordinates.
pub fn tau_star(points: &[(f64, f64)]) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite tau"));
    for w in sorted.windows(2) {
        let ((t0, r0), (t1, r1)) = (w[0], w[1]);
        if r0 <= 1.0 && r1 > 1.0 {
            let frac = (0.0 - r0.ln()) / (r1.ln() - r0.ln());
            return Some((t0.ln() + frac * (t1.ln() - t0.ln())).exp());
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub seed: u64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub epsilon: f64,
    pub fit: Option<SlopeFit>,
    pub tau_star: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    pub tau_star: Option<f64>,
    pub curves: Vec<CurveSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<SimulationResult>,
    pub summary: SweepSummary,
}

fn summarize_curve(config: &SweepConfig, rows: &[SimulationResult]) -> CurveSummary {
    let first = &rows[0];
    let mut notes = Vec::new();
    let mut usable: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        if r.saturated {
            notes.push(format!("tau={:e} saturated, excluded from fit", r.tau));
        } else if r.dcg_infidelity() < config.min_infidelity {
            notes.push(format!("tau={:e} below infidelity threshold, excluded from fit", r.tau));
        } else {
            usable.push((r.tau, r.r));
        }
    }
    usable.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite tau"));
    let window: Vec<(f64, f64)> = match &config.fit_window_policy {
        FitWindowPolicy::All => usable.clone(),
        FitWindowPolicy::Auto => auto_window(&usable).to_vec(),
        FitWindowPolicy::Explicit { tau_min, tau_max } => {
            usable.iter().copied().filter(|(t, _)| *t >= *tau_min && *t <= *tau_max).collect()
        }
    };
    let fit = fit_slope(&window);
    if fit.is_none() && rows.len() > 1 {
        notes.push("fewer than two usable points, no fit".into());
    }
    let all: Vec<(f64, f64)> = rows.iter().filter(|r| r.r.is_finite() && r.r > 0.0).map(|r| (r.tau, r.r)).collect();
    CurveSummary {
        seed: first.seed,
        gamma: first.gamma,
        a: first.a,
        epsilon: first.epsilon,
        fit,
        tau_star: tau_star(&all),
        notes,
    }
}

/// Runs the grid on `jobs` worker threads; rows come back in grid order.
pub fn run_sweep(config: &SweepConfig, jobs: usize) -> Result<SweepOutput> {
    config.validate()?;
    config.error_model.validate()?;
    let grid = config.grid();
    let run = |p: &GridPoint| -> Result<SimulationResult> {
        let model = sample_bath_model(config.n, config.n_b, p.gamma, p.a, p.seed, config.dimension_cap)?;
        run_point(&model, &config.gate, p.tau, &config.error_model.with_epsilon(p.epsilon))
    };
    let rows: Vec<SimulationResult> = if jobs <= 1 {
        grid.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| grid.par_iter().map(run).collect::<Result<_>>())?
    };
    let per_curve = config.tau_grid.len();
    let curves: Vec<CurveSummary> = rows.chunks(per_curve).map(|c| summarize_curve(config, c)).collect();
    let head = &curves[0];
    let summary = SweepSummary {
        slope: head.fit.as_ref().map(|f| f.slope),
        slope_stderr: head.fit.as_ref().map(|f| f.slope_stderr),
        tau_star: head.tau_star,
        curves,
    };
    Ok(SweepOutput { rows, summary })
}

pub const CSV_HEADER: &str = "tau,A,Gamma,epsilon,seed,f_prim,f_dcg,r,saturated";

fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(rows: &[SimulationResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            g17(r.tau),
            g17(r.a),
            g17(r.gamma),
            g17(r.epsilon),
            r.seed,
            g17(r.f_prim),
            g17(r.f_dcg),
            g17(r.r),
            r.saturated
        ));
    }
    out
}
