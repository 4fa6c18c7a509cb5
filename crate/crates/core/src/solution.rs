use std::cmp::Ordering;

use serde::Serialize;

use crate::instance::ScpInstance;

/// A column selection together with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    /// Sorted, 0-based column indices.
    pub selected: Vec<usize>,
    /// Sum of original (unscaled) costs of the selection.
    pub cost: f64,
    pub feasible: bool,
    pub sweeps: usize,
    pub t_steps: usize,
    pub wall_seconds: f64,
    pub final_saturation: f64,
    /// The temperature-step cap was reached before saturation.
    pub exhausted: bool,
    /// Prerun produced no usable estimate; default parameters were substituted.
    pub fallback_parameters: bool,
}

impl Solution {
    /// Builds a solution from a selection, computing cost and feasibility.
    pub fn from_selection(instance: &ScpInstance, mut selected: Vec<usize>) -> Self {
        selected.sort_unstable();
        selected.dedup();
        let eval = instance.evaluate(&selected);
        Self {
            selected,
            cost: eval.cost,
            feasible: eval.feasible,
            sweeps: 0,
            t_steps: 0,
            wall_seconds: 0.0,
            final_saturation: 0.0,
            exhausted: false,
            fallback_parameters: false,
        }
    }

    /// Feasible before infeasible, then cheaper first.
    pub fn rank(&self, other: &Self) -> Ordering {
        other
            .feasible
            .cmp(&self.feasible)
            .then_with(|| self.cost.total_cmp(&other.cost))
    }

    /// Equality on everything except wall-clock time.
    pub fn same_result(&self, other: &Self) -> bool {
        Self {
            wall_seconds: 0.0,
            ..self.clone()
        } == Self {
            wall_seconds: 0.0,
            ..other.clone()
        }
    }

    /// 1-based column indices, as written to solution files.
    pub fn columns_one_based(&self) -> Vec<usize> {
        self.selected.iter().map(|i| i + 1).collect()
    }
}

/// Index of the best solution by [`Solution::rank`]; earliest wins ties.
pub fn best_index(solutions: &[Solution]) -> Option<usize> {
    solutions
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.rank(b).then(ia.cmp(ib)))
        .map(|(i, _)| i)
}
