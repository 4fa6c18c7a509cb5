//! Annealing loop, prerun-based parameter selection and the two-phase solve.

use std::time::Instant;

use serde::Serialize;

use super::params::*;
use super::state::MfState;
use crate::instance::ScpInstance;
use crate::solution::Solution;

/// State of the run after convergence at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t_step: usize,
    pub temperature: f64,
    pub saturation: f64,
    pub mean_change: f64,
    pub sweeps: usize,
}

#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub solution: Solution,
    pub trace: Vec<TraceRecord>,
}

/// Critical temperature `alpha * rho^2 * M * 2^(-rho N)` of a symmetric unicost instance.
///
/// Returns 0.0 on underflow, meaning no estimate.
pub fn estimate_tc_unicost(instance: &ScpInstance, alpha: f64) -> f64 {
    let rho = instance.density();
    let m = instance.n_rows() as f64;
    let n = instance.n_cols() as f64;
    alpha * rho * rho * m * (-rho * n).exp2()
}

/// Runs one annealing schedule from a fresh random start.
pub fn anneal(instance: &ScpInstance, params: &SolverParams) -> Result<AnnealOutcome, ParamError> {
    anneal_stream(instance, params, 0)
}

pub(crate) fn anneal_stream(
    instance: &ScpInstance,
    params: &SolverParams,
    stream: u64,
) -> Result<AnnealOutcome, ParamError> {
    params.validate()?;
    let start = Instant::now();
    let n = instance.n_cols() as f64;
    let saturated_at = (n - 0.5) / n;

    let mut state = MfState::with_stream(instance, params, stream);
    let mut trace = Vec::new();
    let mut saturated;
    let mut sigma;
    let mut previous: Option<Vec<usize>> = None;
    let mut unchanged = 0;
    loop {
        let mut sweeps = 0;
        let mut change;
        loop {
            change = state.sweep(instance, params);
            sweeps += 1;
            if change <= params.converge_tol || sweeps >= params.max_sweeps_per_t {
                break;
            }
        }
        sigma = state.saturation();
        trace.push(TraceRecord {
            t_step: state.t_step_count,
            temperature: state.temperature,
            saturation: sigma,
            mean_change: change,
            sweeps,
        });
        state.t_step_count += 1;
        saturated = sigma >= saturated_at;
        if saturated {
            if params.cooldown_steps == 0 {
                break;
            }
            let selection = state.discretize();
            if instance.evaluate(&selection).feasible {
                break;
            }
            if previous.as_ref() == Some(&selection) {
                unchanged += 1;
            } else {
                unchanged = 0;
            }
            if unchanged >= params.cooldown_steps {
                break;
            }
            previous = Some(selection);
        }
        if state.t_step_count >= params.max_t_steps {
            break;
        }
        state.temperature *= params.k_anneal;
        state.refresh(instance, params);
    }

    let mut solution = Solution::from_selection(instance, state.discretize());
    solution.sweeps = state.sweep_count;
    solution.t_steps = state.t_step_count;
    solution.final_saturation = sigma;
    solution.exhausted = !saturated;
    solution.wall_seconds = start.elapsed().as_secs_f64();
    Ok(AnnealOutcome { solution, trace })
}

/// Estimates from the fast preliminary run.
#[derive(Debug, Clone)]
pub struct Prerun {
    /// Largest scaled cost among the selected columns.
    pub c_max_star: f64,
    /// Temperature at which the saturation first exceeds [`SATURATION_ONSET`].
    pub t_c_est: f64,
    pub fallback: bool,
    pub outcome: AnnealOutcome,
}

fn prerun_params(base: &SolverParams) -> SolverParams {
    SolverParams {
        k_anneal: PRERUN_K,
        alpha: PRERUN_ALPHA,
        t0: PRERUN_T0,
        ..base.clone()
    }
}

/// Fast anneal that estimates the relevant cost scale and critical temperature.
pub fn prerun(instance: &ScpInstance, base: &SolverParams) -> Result<Prerun, ParamError> {
    prerun_stream(instance, base, 0)
}

fn prerun_stream(
    instance: &ScpInstance,
    base: &SolverParams,
    stream: u64,
) -> Result<Prerun, ParamError> {
    let params = prerun_params(base);
    let outcome = anneal_stream(instance, &params, stream)?;
    let scaled = instance.costs_scaled();
    let c_max_star = outcome
        .solution
        .selected
        .iter()
        .map(|&i| scaled[i])
        .fold(0.0, f64::max);
    let onset = outcome
        .trace
        .iter()
        .find(|r| r.saturation > SATURATION_ONSET)
        .map(|r| r.temperature);
    match onset {
        Some(t_c_est) if c_max_star > 0.0 => Ok(Prerun {
            c_max_star,
            t_c_est,
            fallback: false,
            outcome,
        }),
        _ => Ok(Prerun {
            c_max_star: 1.0,
            t_c_est: params.t0 / 10.0,
            fallback: true,
            outcome,
        }),
    }
}

/// Full record of a two-phase solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Solution,
    /// Parameters of the main run.
    pub params: SolverParams,
    pub unicost: bool,
    pub prerun: Option<Prerun>,
    pub trace: Vec<TraceRecord>,
}

/// Solves with the standard parameter selection, see [`solve_detailed`].
pub fn solve(instance: &ScpInstance, overrides: &Overrides) -> Result<Solution, ParamError> {
    solve_detailed(instance, overrides).map(|o| o.solution)
}

/// Unicost instances get one anneal with the fixed unicost parameters. Weighted
/// instances get a prerun that sets `alpha = 1.05 c_max*` and `T0 = 2 T_c` for
/// the main run; the better of the two solutions is returned unless `alpha` was
/// overridden. Overrides always take precedence over derived values.
pub fn solve_detailed(
    instance: &ScpInstance,
    overrides: &Overrides,
) -> Result<SolveOutcome, ParamError> {
    let start = Instant::now();
    let base = overrides.base_params(instance.nnz());
    let unicost = overrides.force_unicost || instance.is_unicost();

    if unicost {
        let params = SolverParams {
            k_anneal: overrides.k_anneal.unwrap_or(UNICOST_K),
            alpha: overrides.alpha.unwrap_or(UNICOST_ALPHA),
            t0: overrides.t0.unwrap_or(UNICOST_T0),
            ..base
        };
        let AnnealOutcome { mut solution, trace } = anneal_stream(instance, &params, 1)?;
        solution.wall_seconds = start.elapsed().as_secs_f64();
        return Ok(SolveOutcome {
            solution,
            params,
            unicost,
            prerun: None,
            trace,
        });
    }

    let prerun = match (overrides.alpha, overrides.t0) {
        (Some(_), Some(_)) => None,
        _ => Some(prerun_stream(instance, &base, 0)?),
    };
    let (c_max_star, t_c) = prerun
        .as_ref()
        .map_or((1.0, PRERUN_T0 / 10.0), |p| (p.c_max_star, p.t_c_est));
    let params = SolverParams {
        k_anneal: overrides.k_anneal.unwrap_or(MAIN_K),
        alpha: overrides.alpha.unwrap_or(ALPHA_MARGIN * c_max_star),
        t0: overrides.t0.unwrap_or(T0_FACTOR * t_c),
        ..base
    };
    let AnnealOutcome { mut solution, trace } = anneal_stream(instance, &params, 1)?;

    if let Some(pre) = &prerun {
        let pre_sol = &pre.outcome.solution;
        if overrides.alpha.is_none() && pre_sol.rank(&solution).is_lt() {
            solution = Solution {
                sweeps: solution.sweeps,
                t_steps: solution.t_steps,
                ..pre_sol.clone()
            };
        }
        solution.sweeps += pre_sol.sweeps;
        solution.t_steps += pre_sol.t_steps;
        solution.fallback_parameters = pre.fallback;
    }
    solution.wall_seconds = start.elapsed().as_secs_f64();
    Ok(SolveOutcome {
        solution,
        params,
        unicost,
        prerun,
        trace,
    })
}

/// Comma-separated trace with a header line.
pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("t_step,temperature,sigma,mean_change\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.t_step, r.temperature, r.saturation, r.mean_change
        ));
    }
    out
}
