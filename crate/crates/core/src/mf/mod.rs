//! Mean-field annealing with the multilinear covering penalty.

mod anneal;
mod params;
mod state;

pub use anneal::{
    anneal, estimate_tc_unicost, prerun, solve, solve_detailed, trace_csv, AnnealOutcome, Prerun,
    SolveOutcome, TraceRecord,
};
pub use params::*;
pub use state::{saturation, MfState, EXP_CLAMP, V_MAX, V_MIN};
