//! Mean-field annealing for the set covering problem.
//!
//! Columns are selected by iterating the mean-field equations
//! `v_i = 1 / (1 + exp(delta_e_i / T))` while lowering `T` geometrically,
//! with the covering constraints encoded as the multilinear penalty
//! `alpha * sum_k prod_{i in row k} (1 - v_i)`. A sweep over all variables
//! costs `O(nnz)` thanks to a cached product per row.
//!
//! ```
//! use mfscp_core::{example_instance, solve, Overrides};
//!
//! let instance = example_instance();
//! let solution = solve(&instance, &Overrides::with_seed(1)).unwrap();
//! assert!(solution.feasible);
//! ```

pub mod baselines;
pub mod bench;
pub mod format;
pub mod generate;
pub mod instance;
pub mod mf;
mod solution;

pub use format::{detect_format, emit, parse, parse_auto, FormatKind, ParseError};
pub use instance::{
    example_instance, DomainError, Evaluation, InstanceError, InstanceStats, PenaltyMode,
    ScpInstance,
};
pub use mf::{anneal, solve, solve_detailed, Overrides, SolverParams};
pub use solution::{best_index, Solution};
