//! Sparse zero-one covering matrix with column costs.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance must have at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },
    #[error("row {0} is not covered by any column")]
    UnsatisfiableRow(usize),
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    BadIndex {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("cost of column {col} is {value}, costs must be finite and non-negative")]
    BadCost { col: usize, value: f64 },
    #[error("expected {expected} costs, got {got}")]
    CostCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("mean-field variable {index} = {value} lies outside [0, 1]")]
pub struct DomainError {
    pub index: usize,
    pub value: f64,
}

/// Constraint penalty used in the energy function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyMode {
    /// `alpha * sum_k prod_{i in row k} (1 - v_i)`
    #[default]
    Multilinear,
    /// `alpha * sum_k max(0, 1 - sum_{i in row k} v_i)`
    Piecewise,
}

/// An immutable set covering instance.
///
/// Rows and columns are 0-based internally. Both adjacency directions are
/// stored so that row products and column updates are `O(nnz)` per sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScpInstance {
    n_rows: usize,
    n_cols: usize,
    costs: Vec<f64>,
    costs_scaled: Vec<f64>,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceStats {
    pub density: f64,
    pub col_sums: Vec<usize>,
    pub row_sums: Vec<usize>,
    pub unicost: bool,
}

/// Cost and feasibility of a column selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    pub feasible: bool,
    pub uncovered_rows: Vec<usize>,
}

impl ScpInstance {
    /// Builds an instance from 0-based `(row, col)` entries. Duplicates are coalesced.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        costs: Vec<f64>,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(InstanceError::Empty {
                rows: n_rows,
                cols: n_cols,
            });
        }
        if costs.len() != n_cols {
            return Err(InstanceError::CostCount {
                expected: n_cols,
                got: costs.len(),
            });
        }
        if let Some((col, &value)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite() || **c < 0.0)
        {
            return Err(InstanceError::BadCost { col, value });
        }
        if n_rows > u32::MAX as usize || n_cols > u32::MAX as usize {
            return Err(InstanceError::BadIndex {
                row: n_rows,
                col: n_cols,
                rows: n_rows,
                cols: n_cols,
            });
        }

        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n_rows];
        for (row, col) in entries {
            if row >= n_rows || col >= n_cols {
                return Err(InstanceError::BadIndex {
                    row,
                    col,
                    rows: n_rows,
                    cols: n_cols,
                });
            }
            rows[row].push(col as u32);
        }
        for (k, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if row.is_empty() {
                return Err(InstanceError::UnsatisfiableRow(k));
            }
        }

        let mut col_len = vec![0usize; n_cols];
        for row in &rows {
            for &i in row {
                col_len[i as usize] += 1;
            }
        }
        let mut cols: Vec<Vec<u32>> = col_len.into_iter().map(Vec::with_capacity).collect();
        // Rows are visited in order, so each column list comes out sorted.
        for (k, row) in rows.iter().enumerate() {
            for &i in row {
                cols[i as usize].push(k as u32);
            }
        }
        let nnz = rows.iter().map(Vec::len).sum();

        let max_cost = costs.iter().copied().fold(0.0_f64, f64::max);
        let costs_scaled = if max_cost > 0.0 {
            costs.iter().map(|c| c / max_cost).collect()
        } else {
            vec![0.0; n_cols]
        };

        Ok(Self {
            n_rows,
            n_cols,
            costs,
            costs_scaled,
            rows,
            cols,
            nnz,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Costs divided by the largest cost, so they lie in `[0, 1]`.
    pub fn costs_scaled(&self) -> &[f64] {
        &self.costs_scaled
    }

    /// Sorted column indices covering row `k`.
    pub fn row(&self, k: usize) -> &[u32] {
        &self.rows[k]
    }

    /// Sorted row indices covered by column `i`.
    pub fn col(&self, i: usize) -> &[u32] {
        &self.cols[i]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn density(&self) -> f64 {
        self.nnz as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    pub fn is_unicost(&self) -> bool {
        let first = self.costs[0];
        self.costs.iter().all(|&c| c == first)
    }

    pub fn stats(&self) -> InstanceStats {
        InstanceStats {
            density: self.density(),
            col_sums: self.cols.iter().map(Vec::len).collect(),
            row_sums: self.rows.iter().map(Vec::len).collect(),
            unicost: self.is_unicost(),
        }
    }

    /// Original-scale cost and coverage of a selection of 0-based columns.
    ///
    /// Out-of-range and repeated columns are ignored.
    pub fn evaluate(&self, selection: &[usize]) -> Evaluation {
        let mut chosen = vec![false; self.n_cols];
        for &i in selection {
            if i < self.n_cols {
                chosen[i] = true;
            }
        }
        let cost = chosen
            .iter()
            .zip(&self.costs)
            .filter(|(s, _)| **s)
            .fold(0.0, |acc, (_, c)| acc + c);
        let uncovered_rows: Vec<usize> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !row.iter().any(|&i| chosen[i as usize]))
            .map(|(k, _)| k)
            .collect();
        Evaluation {
            cost,
            feasible: uncovered_rows.is_empty(),
            uncovered_rows,
        }
    }

    /// Energy of a mean-field configuration, using scaled costs.
    pub fn energy(&self, v: &[f64], alpha: f64, mode: PenaltyMode) -> Result<f64, DomainError> {
        assert_eq!(v.len(), self.n_cols, "configuration length must equal N");
        if let Some((index, &value)) = v
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(DomainError { index, value });
        }
        let cost: f64 = self.costs_scaled.iter().zip(v).map(|(c, x)| c * x).sum();
        let penalty: f64 = match mode {
            PenaltyMode::Multilinear => self
                .rows
                .iter()
                .map(|row| row.iter().map(|&i| 1.0 - v[i as usize]).product::<f64>())
                .sum(),
            PenaltyMode::Piecewise => self
                .rows
                .iter()
                .map(|row| {
                    let s: f64 = row.iter().map(|&i| v[i as usize]).sum();
                    (1.0 - s).max(0.0)
                })
                .sum(),
        };
        Ok(cost + alpha * penalty)
    }

    /// Sum of original costs of all columns.
    pub fn total_cost(&self) -> f64 {
        self.costs.iter().fold(0.0, |acc, c| acc + c)
    }
}

/// The 4x5 example instance used throughout the documentation and tests.
///
/// ```text
/// c = (1, 2, 3, 4, 5)
/// 1 0 1 0 1
/// 0 1 0 1 0
/// 1 1 0 0 1
/// 0 0 1 1 1
/// ```
pub fn example_instance() -> ScpInstance {
    let matrix = [[1, 0, 1, 0, 1], [0, 1, 0, 1, 0], [1, 1, 0, 0, 1], [0, 0, 1, 1, 1]];
    let entries = matrix.iter().enumerate().flat_map(|(k, row)| {
        row.iter()
            .enumerate()
            .filter(|(_, &a)| a == 1)
            .map(move |(i, _)| (k, i))
    });
    ScpInstance::new(4, 5, vec![1.0, 2.0, 3.0, 4.0, 5.0], entries).expect("valid example")
}
