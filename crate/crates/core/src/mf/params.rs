use serde::Serialize;
use thiserror::Error;

use crate::instance::PenaltyMode;

/// Annealing factor, penalty weight and start temperature for unicost instances.
pub const UNICOST_K: f64 = 0.80;
pub const UNICOST_ALPHA: f64 = 1.05;
pub const UNICOST_T0: f64 = 50.0;

/// Parameters of the fast preliminary run for weighted instances.
pub const PRERUN_K: f64 = 0.65;
pub const PRERUN_ALPHA: f64 = 1.01;
pub const PRERUN_T0: f64 = 50.0;

/// Main run for weighted instances: `alpha = ALPHA_MARGIN * c_max*`, `T0 = T0_FACTOR * T_c`.
pub const MAIN_K: f64 = 0.80;
pub const ALPHA_MARGIN: f64 = 1.05;
pub const T0_FACTOR: f64 = 2.0;

/// Saturation above which the prerun is considered to have left the symmetric point.
pub const SATURATION_ONSET: f64 = 0.01;

/// Truncation threshold applied to large instances.
pub const TRUNCATION_EPS: f64 = 0.05;
/// Truncation is switched on automatically above this many nonzeros.
pub const TRUNCATION_NNZ: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("annealing factor must lie in (0, 1), got {0}")]
    AnnealFactor(f64),
    #[error("penalty weight must be finite and non-negative, got {0}")]
    Alpha(f64),
    #[error("start temperature must be finite and positive, got {0}")]
    Temperature(f64),
    #[error("convergence tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("initial half-width must lie in [0, 0.5), got {0}")]
    HalfWidth(f64),
    #[error("truncation threshold must lie in [0, 0.5), got {0}")]
    Truncation(f64),
    #[error("iteration caps must be at least 1")]
    Caps,
}

/// Parameters of a single annealing run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverParams {
    pub k_anneal: f64,
    pub alpha: f64,
    pub t0: f64,
    /// Mean absolute change per sweep below which a temperature is converged.
    pub converge_tol: f64,
    /// Initial `v` is drawn from `[0.5 - h, 0.5 + h]`.
    pub init_halfwidth: f64,
    /// `v_j < trunc_eps` counts as zero inside `delta_e`; 0 disables.
    pub trunc_eps: f64,
    pub penalty_mode: PenaltyMode,
    pub max_sweeps_per_t: usize,
    pub max_t_steps: usize,
    /// Full row-cache recomputation period, in sweeps.
    pub refresh_interval: usize,
    /// After saturation, keep cooling while the discretized selection is
    /// infeasible, stopping once it has been unchanged for this many
    /// temperature steps. 0 stops at saturation.
    pub cooldown_steps: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            k_anneal: UNICOST_K,
            alpha: UNICOST_ALPHA,
            t0: UNICOST_T0,
            converge_tol: 0.01,
            init_halfwidth: 0.001,
            trunc_eps: 0.0,
            penalty_mode: PenaltyMode::Multilinear,
            max_sweeps_per_t: 200,
            max_t_steps: 400,
            refresh_interval: 64,
            cooldown_steps: 20,
            seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.k_anneal > 0.0 && self.k_anneal < 1.0) {
            return Err(ParamError::AnnealFactor(self.k_anneal));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(ParamError::Alpha(self.alpha));
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(ParamError::Temperature(self.t0));
        }
        if self.converge_tol.is_nan() || self.converge_tol <= 0.0 {
            return Err(ParamError::Tolerance(self.converge_tol));
        }
        if !(0.0..0.5).contains(&self.init_halfwidth) {
            return Err(ParamError::HalfWidth(self.init_halfwidth));
        }
        if !(0.0..0.5).contains(&self.trunc_eps) {
            return Err(ParamError::Truncation(self.trunc_eps));
        }
        if self.max_sweeps_per_t == 0 || self.max_t_steps == 0 || self.refresh_interval == 0 {
            return Err(ParamError::Caps);
        }
        Ok(())
    }
}

/// User-supplied values that take precedence over derived parameters in [`super::solve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub k_anneal: Option<f64>,
    pub alpha: Option<f64>,
    pub t0: Option<f64>,
    /// Use the unicost parameter set even when costs differ.
    pub force_unicost: bool,
    pub penalty_mode: PenaltyMode,
    /// `None` selects truncation automatically from the instance size.
    pub trunc_eps: Option<f64>,
    pub seed: u64,
    pub converge_tol: Option<f64>,
    pub max_sweeps_per_t: Option<usize>,
    pub max_t_steps: Option<usize>,
    pub cooldown_steps: Option<usize>,
}

impl Overrides {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Parameters shared by every run of a solve, before k/alpha/T0 are chosen.
    pub(crate) fn base_params(&self, nnz: usize) -> SolverParams {
        let defaults = SolverParams::default();
        SolverParams {
            trunc_eps: self.trunc_eps.unwrap_or(if nnz > TRUNCATION_NNZ {
                TRUNCATION_EPS
            } else {
                0.0
            }),
            penalty_mode: self.penalty_mode,
            converge_tol: self.converge_tol.unwrap_or(defaults.converge_tol),
            max_sweeps_per_t: self.max_sweeps_per_t.unwrap_or(defaults.max_sweeps_per_t),
            max_t_steps: self.max_t_steps.unwrap_or(defaults.max_t_steps),
            cooldown_steps: self.cooldown_steps.unwrap_or(defaults.cooldown_steps),
            seed: self.seed,
            ..defaults
        }
    }
}
