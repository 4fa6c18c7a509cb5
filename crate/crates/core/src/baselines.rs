//! Exact enumeration for tiny instances and the classic greedy heuristics.

use std::cmp::Ordering;

use thiserror::Error;

use crate::instance::ScpInstance;
use crate::solution::Solution;

pub const DEFAULT_EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("exhaustive search limited to {limit} columns, instance has {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("selection leaves {0} row(s) uncovered")]
    NotFeasible(usize),
}

struct Exact<'a> {
    instance: &'a ScpInstance,
    /// Rows whose highest column index is `j`; they must be covered once `j` is decided.
    closing: Vec<Vec<usize>>,
    cover: Vec<u32>,
    current: Vec<usize>,
    cost: f64,
    best: Option<(f64, Vec<usize>)>,
}

impl Exact<'_> {
    fn search(&mut self, j: usize) {
        if let Some((best, _)) = &self.best {
            if self.cost > *best {
                return;
            }
        }
        if j == self.instance.n_cols() {
            let better = match &self.best {
                None => true,
                Some((best, set)) => match self.cost.total_cmp(best) {
                    Ordering::Less => true,
                    Ordering::Equal => self.current < *set,
                    Ordering::Greater => false,
                },
            };
            if better {
                self.best = Some((self.cost, self.current.clone()));
            }
            return;
        }
        let rows = self.instance.col(j);
        let c = self.instance.costs()[j];

        // Including j first visits lexicographically smaller sets first.
        for &k in rows {
            self.cover[k as usize] += 1;
        }
        self.current.push(j);
        self.cost += c;
        self.search(j + 1);
        self.cost -= c;
        self.current.pop();
        for &k in rows {
            self.cover[k as usize] -= 1;
        }

        if self.closing[j].iter().all(|&k| self.cover[k] > 0) {
            self.search(j + 1);
        }
    }
}

/// Minimum-cost cover by exhaustive search with cost-bound pruning.
///
/// Among optimal covers the lexicographically smallest sorted column list is returned.
pub fn exact_brute_force(instance: &ScpInstance, limit_n: usize) -> Result<Solution, BaselineError> {
    let n = instance.n_cols();
    if n > limit_n {
        return Err(BaselineError::TooLarge { n, limit: limit_n });
    }
    let mut closing = vec![Vec::new(); n];
    for (k, row) in instance.rows().iter().enumerate() {
        let last = *row.last().expect("rows are non-empty") as usize;
        closing[last].push(k);
    }
    let mut search = Exact {
        instance,
        closing,
        cover: vec![0; instance.n_rows()],
        current: Vec::with_capacity(n),
        cost: 0.0,
        best: None,
    };
    search.search(0);
    let (_, selected) = search.best.expect("the full column set is a cover");
    Ok(Solution::from_selection(instance, selected))
}

/// Greedy over the rows flagged in `uncovered`, starting from `selected`.
fn greedy_from(instance: &ScpInstance, mut uncovered: Vec<bool>, selected: &mut Vec<usize>) {
    let mut gain: Vec<usize> = instance
        .cols()
        .iter()
        .map(|col| col.iter().filter(|&&k| uncovered[k as usize]).count())
        .collect();
    let mut remaining = uncovered.iter().filter(|u| **u).count();
    let costs = instance.costs();

    while remaining > 0 {
        let mut pick: Option<(usize, f64)> = None;
        for (i, &g) in gain.iter().enumerate() {
            if g == 0 {
                continue;
            }
            let ratio = costs[i] / g as f64;
            let better = match pick {
                None => true,
                Some((b, best_ratio)) => match ratio.total_cmp(&best_ratio) {
                    Ordering::Less => true,
                    Ordering::Equal => g > gain[b],
                    Ordering::Greater => false,
                },
            };
            if better {
                pick = Some((i, ratio));
            }
        }
        let (i, _) = pick.expect("every uncovered row has a column");
        selected.push(i);
        for &k in instance.col(i) {
            let k = k as usize;
            if uncovered[k] {
                uncovered[k] = false;
                remaining -= 1;
                for &j in instance.row(k) {
                    gain[j as usize] -= 1;
                }
            }
        }
    }
}

/// Ratio greedy: repeatedly take the column with the lowest cost per newly
/// covered row, preferring more coverage and then the lower index on ties.
pub fn greedy(instance: &ScpInstance) -> Solution {
    let mut selected = Vec::new();
    greedy_from(instance, vec![true; instance.n_rows()], &mut selected);
    Solution::from_selection(instance, selected)
}

/// Drops selected columns, most expensive first, while the cover stays feasible.
pub fn remove_redundant(instance: &ScpInstance, solution: &Solution) -> Result<Solution, BaselineError> {
    let eval = instance.evaluate(&solution.selected);
    if !eval.feasible {
        return Err(BaselineError::NotFeasible(eval.uncovered_rows.len()));
    }
    let mut cover = vec![0u32; instance.n_rows()];
    for &i in &solution.selected {
        for &k in instance.col(i) {
            cover[k as usize] += 1;
        }
    }
    let costs = instance.costs();
    let mut order = solution.selected.clone();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    let mut keep = Vec::with_capacity(order.len());
    for i in order {
        let rows = instance.col(i);
        if rows.iter().all(|&k| cover[k as usize] > 1) {
            for &k in rows {
                cover[k as usize] -= 1;
            }
        } else {
            keep.push(i);
        }
    }
    Ok(Solution::from_selection(instance, keep))
}

/// Completes any selection greedily, then removes redundant columns.
pub fn greedy_repair(instance: &ScpInstance, solution: &Solution) -> Solution {
    let eval = instance.evaluate(&solution.selected);
    let mut uncovered = vec![false; instance.n_rows()];
    for k in eval.uncovered_rows {
        uncovered[k] = true;
    }
    let mut selected = solution.selected.clone();
    greedy_from(instance, uncovered, &mut selected);
    let repaired = Solution::from_selection(instance, selected);
    let mut out = remove_redundant(instance, &repaired).expect("greedy completion is feasible");
    out.sweeps = solution.sweeps;
    out.t_steps = solution.t_steps;
    out.wall_seconds = solution.wall_seconds;
    out.final_saturation = solution.final_saturation;
    out.exhausted = solution.exhausted;
    out.fallback_parameters = solution.fallback_parameters;
    out
}
