//! Multi-trial solve shared by the command line and the service.

use std::time::Instant;

use mfscp_core::baselines::greedy_repair;
use mfscp_core::mf::{solve_detailed, ParamError, TraceRecord};
use mfscp_core::{best_index, FormatKind, Overrides, ScpInstance, Solution};
use rayon::prelude::*;
use serde::Serialize;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct SolveConfig {
    pub trials: usize,
    pub seed: u64,
    pub overrides: Overrides,
    /// Complete and prune the best solution greedily.
    pub repair: bool,
}

#[derive(Debug, Clone)]
pub struct SolveRun {
    pub solution: Solution,
    pub best_seed: u64,
    pub trial_costs: Vec<f64>,
    pub repaired: bool,
    /// Trace of the winning trial.
    pub trace: Vec<TraceRecord>,
    pub wall_seconds: f64,
}

/// Runs `trials` solves with seeds `seed..seed + trials` and keeps the best.
pub fn run_solve(instance: &ScpInstance, config: &SolveConfig) -> Result<SolveRun, ParamError> {
    let start = Instant::now();
    let trials = config.trials.max(1) as u64;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = config.seed.wrapping_add(t);
            let overrides = Overrides {
                seed,
                ..config.overrides.clone()
            };
            solve_detailed(instance, &overrides).map(|o| (seed, o))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let solutions: Vec<Solution> = outcomes.iter().map(|(_, o)| o.solution.clone()).collect();
    let best = best_index(&solutions).expect("at least one trial");
    let (best_seed, outcome) = outcomes.into_iter().nth(best).expect("index in range");
    let mut solution = outcome.solution;
    let mut repaired = false;
    if config.repair {
        let fixed = greedy_repair(instance, &solution);
        repaired = fixed.selected != solution.selected;
        solution = fixed;
    }
    Ok(SolveRun {
        solution,
        best_seed,
        trial_costs: solutions.iter().map(|s| s.cost).collect(),
        repaired,
        trace: outcome.trace,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Versioned JSON report of a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub cost: f64,
    pub feasible: bool,
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub nnz: usize,
    pub unicost: bool,
    pub format: &'static str,
    pub trials: usize,
    pub seed: u64,
    pub best_seed: u64,
    pub trial_costs: Vec<f64>,
    pub repaired: bool,
    pub exhausted: bool,
    pub fallback_parameters: bool,
    pub sweeps: usize,
    pub t_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
    /// Selected columns, 1-based and sorted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
}

impl SolveReport {
    pub fn new(
        instance: &ScpInstance,
        kind: FormatKind,
        config: &SolveConfig,
        run: &SolveRun,
        columns: bool,
        timing: bool,
    ) -> Self {
        let s = &run.solution;
        Self {
            schema: SCHEMA_VERSION,
            cost: s.cost,
            feasible: s.feasible,
            rows: instance.n_rows(),
            cols: instance.n_cols(),
            density: instance.density(),
            nnz: instance.nnz(),
            unicost: instance.is_unicost(),
            format: kind.name(),
            trials: run.trial_costs.len(),
            seed: config.seed,
            best_seed: run.best_seed,
            trial_costs: run.trial_costs.clone(),
            repaired: run.repaired,
            exhausted: s.exhausted,
            fallback_parameters: s.fallback_parameters,
            sweeps: s.sweeps,
            t_steps: s.t_steps,
            wall_seconds: timing.then_some(run.wall_seconds),
            columns: columns.then(|| s.columns_one_based()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mfscp_core::example_instance;

    #[test]
    fn best_of_trials_is_deterministic() {
        let inst = example_instance();
        let config = SolveConfig {
            trials: 10,
            seed: 3,
            ..SolveConfig::default()
        };
        let a = run_solve(&inst, &config).unwrap();
        let b = run_solve(&inst, &config).unwrap();
        assert!(a.solution.same_result(&b.solution));
        assert_eq!(a.best_seed, b.best_seed);
        assert_eq!(a.solution.cost, 5.0);
        assert_eq!(a.trial_costs.len(), 10);
        assert_eq!(a.trace.len(), a.solution.t_steps.min(a.trace.len()));
    }

    #[test]
    fn repair_fixes_infeasible() {
        let inst = example_instance();
        let config = SolveConfig {
            trials: 1,
            overrides: Overrides {
                alpha: Some(0.0),
                ..Overrides::default()
            },
            repair: true,
            ..SolveConfig::default()
        };
        let run = run_solve(&inst, &config).unwrap();
        assert!(run.solution.feasible);
        assert!(run.repaired);
    }

    #[test]
    fn report_fields() {
        let inst = example_instance();
        let config = SolveConfig {
            trials: 2,
            ..SolveConfig::default()
        };
        let run = run_solve(&inst, &config).unwrap();
        let r = SolveReport::new(&inst, FormatKind::RowOrdering, &config, &run, true, false);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["format"], "row");
        assert!(json.get("wall_seconds").is_none());
        assert_eq!(r.columns.as_ref().unwrap().len(), run.solution.selected.len());
        assert!(r.columns.unwrap().iter().all(|&c| c >= 1));
    }
}
