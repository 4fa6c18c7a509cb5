//! Mean-field variables and the row caches that make a sweep `O(nnz)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::SolverParams;
use crate::instance::{PenaltyMode, ScpInstance};

/// Lower clamp for mean-field variables; the upper clamp is `1 - V_MIN`.
pub const V_MIN: f64 = 1e-12;
pub const V_MAX: f64 = 1.0 - V_MIN;
/// Bound on `|delta_e / T|` before exponentiation.
pub const EXP_CLAMP: f64 = 500.0;

/// Mutable solver state for one annealing run.
#[derive(Debug, Clone)]
pub struct MfState {
    v: Vec<f64>,
    /// `row_prod[k] = prod_{i in row k} (1 - v_i)`.
    row_prod: Vec<f64>,
    /// `row_sum[k] = sum_{i in row k} v_i`; piecewise mode only.
    row_sum: Vec<f64>,
    /// Like `row_prod` but skipping truncated variables; truncation mode only.
    trunc_prod: Vec<f64>,
    truncated: Vec<bool>,
    order: Vec<u32>,
    pub temperature: f64,
    pub sweep_count: usize,
    pub t_step_count: usize,
    rng: ChaCha8Rng,
}

impl MfState {
    /// Random start near the symmetric point, on RNG stream 0.
    pub fn new(instance: &ScpInstance, params: &SolverParams) -> Self {
        Self::with_stream(instance, params, 0)
    }

    pub(crate) fn with_stream(instance: &ScpInstance, params: &SolverParams, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(stream);
        let h = params.init_halfwidth;
        let v = (0..instance.n_cols())
            .map(|_| 0.5 + h * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        let m = instance.n_rows();
        let mut state = Self {
            v,
            row_prod: vec![1.0; m],
            row_sum: if params.penalty_mode == PenaltyMode::Piecewise {
                vec![0.0; m]
            } else {
                Vec::new()
            },
            trunc_prod: if params.trunc_eps > 0.0 {
                vec![1.0; m]
            } else {
                Vec::new()
            },
            truncated: Vec::new(),
            order: (0..instance.n_cols() as u32).collect(),
            temperature: params.t0,
            sweep_count: 0,
            t_step_count: 0,
            rng,
        };
        state.refresh(instance, params);
        state
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn row_prod(&self) -> &[f64] {
        &self.row_prod
    }

    /// Overwrites the variables (clamped into the open unit interval) and rebuilds every cache.
    pub fn set_v(&mut self, instance: &ScpInstance, params: &SolverParams, v: &[f64]) {
        assert_eq!(v.len(), self.v.len());
        for (dst, &x) in self.v.iter_mut().zip(v) {
            *dst = x.clamp(V_MIN, V_MAX);
        }
        self.refresh(instance, params);
    }

    /// Recomputes all row caches from `v`.
    pub fn refresh(&mut self, instance: &ScpInstance, params: &SolverParams) {
        for (k, row) in instance.rows().iter().enumerate() {
            self.row_prod[k] = row.iter().map(|&i| 1.0 - self.v[i as usize]).product();
        }
        if !self.row_sum.is_empty() {
            for (k, row) in instance.rows().iter().enumerate() {
                self.row_sum[k] = row.iter().map(|&i| self.v[i as usize]).sum();
            }
        }
        if params.trunc_eps > 0.0 {
            self.refresh_truncation(instance, params.trunc_eps);
        }
    }

    fn refresh_truncation(&mut self, instance: &ScpInstance, eps: f64) {
        if self.trunc_prod.len() != instance.n_rows() {
            self.trunc_prod = vec![1.0; instance.n_rows()];
        }
        self.truncated.clear();
        self.truncated.extend(self.v.iter().map(|&x| x < eps));
        for (k, row) in instance.rows().iter().enumerate() {
            self.trunc_prod[k] = row
                .iter()
                .filter(|&&i| !self.truncated[i as usize])
                .map(|&i| 1.0 - self.v[i as usize])
                .product();
        }
    }

    /// `E(v_i = 1) - E(v_i = 0)` with every other variable held fixed.
    pub fn delta_e(&self, instance: &ScpInstance, i: usize, alpha: f64, mode: PenaltyMode) -> f64 {
        let cost = instance.costs_scaled()[i];
        let rows = instance.col(i);
        match mode {
            PenaltyMode::Multilinear => {
                let (cache, own) = if self.trunc_prod.is_empty() {
                    (&self.row_prod, 1.0 - self.v[i])
                } else if self.truncated[i] {
                    (&self.trunc_prod, 1.0)
                } else {
                    (&self.trunc_prod, 1.0 - self.v[i])
                };
                let others: f64 = rows.iter().map(|&k| cache[k as usize]).sum();
                cost - alpha * others / own
            }
            PenaltyMode::Piecewise => {
                let vi = self.v[i];
                let slack: f64 = rows
                    .iter()
                    .map(|&k| (1.0 - (self.row_sum[k as usize] - vi)).max(0.0))
                    .sum();
                cost - alpha * slack
            }
        }
    }

    /// Sets `v_i` to its mean-field value at the current temperature.
    /// Returns `|v_new - v_old|`.
    pub fn update_variable(
        &mut self,
        instance: &ScpInstance,
        i: usize,
        params: &SolverParams,
    ) -> f64 {
        let de = self.delta_e(instance, i, params.alpha, params.penalty_mode);
        let x = (-de / self.temperature).clamp(-EXP_CLAMP, EXP_CLAMP);
        let new = (1.0 / (1.0 + (-x).exp())).clamp(V_MIN, V_MAX);
        let old = self.v[i];
        if new == old {
            return 0.0;
        }
        self.v[i] = new;
        let ratio = (1.0 - new) / (1.0 - old);
        let rows = instance.col(i);
        for &k in rows {
            self.row_prod[k as usize] *= ratio;
        }
        if !self.row_sum.is_empty() {
            for &k in rows {
                self.row_sum[k as usize] += new - old;
            }
        }
        if !self.trunc_prod.is_empty() && !self.truncated[i] {
            for &k in rows {
                self.trunc_prod[k as usize] *= ratio;
            }
        }
        (new - old).abs()
    }

    /// Updates every variable once in a fresh random order.
    /// Returns the mean absolute change.
    pub fn sweep(&mut self, instance: &ScpInstance, params: &SolverParams) -> f64 {
        if params.trunc_eps > 0.0 {
            self.refresh_truncation(instance, params.trunc_eps);
        }
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng);
        let total: f64 = order
            .iter()
            .map(|&i| self.update_variable(instance, i as usize, params))
            .sum();
        self.order = order;
        self.sweep_count += 1;
        if self.sweep_count.is_multiple_of(params.refresh_interval) {
            self.refresh(instance, params);
        }
        total / self.v.len() as f64
    }

    pub fn saturation(&self) -> f64 {
        saturation(&self.v)
    }

    /// Columns with `v_i >= 0.5`.
    pub fn discretize(&self) -> Vec<usize> {
        self.v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= 0.5)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest relative deviation of the row-product cache from recomputation.
    pub fn cache_error(&self, instance: &ScpInstance) -> f64 {
        instance
            .rows()
            .iter()
            .zip(&self.row_prod)
            .map(|(row, &cached)| {
                let exact: f64 = row.iter().map(|&i| 1.0 - self.v[i as usize]).product();
                if exact == 0.0 {
                    cached.abs()
                } else {
                    ((cached - exact) / exact).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `(4 / N) * sum_i (v_i - 1/2)^2`: 0 at the symmetric point, 1 when every variable is binary.
pub fn saturation(v: &[f64]) -> f64 {
    let s: f64 = v.iter().map(|x| (x - 0.5) * (x - 0.5)).sum();
    4.0 * s / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::example_instance;

    fn params(h: f64) -> SolverParams {
        SolverParams {
            init_halfwidth: h,
            alpha: 1.0,
            ..SolverParams::default()
        }
    }

    #[test]
    fn symmetric_start() {
        let inst = example_instance();
        let state = MfState::new(&inst, &params(0.0));
        assert!(state.v().iter().all(|&x| x == 0.5));
        assert_eq!(state.row_prod(), &[0.125, 0.25, 0.125, 0.125]);
        assert_eq!(state.temperature, 50.0);
    }

    #[test]
    fn start_is_seeded() {
        let inst = example_instance();
        let p = params(0.001);
        let a = MfState::new(&inst, &p);
        let b = MfState::new(&inst, &p);
        assert_eq!(a.v(), b.v());
        assert!(a.v().iter().all(|&x| (0.499..=0.501).contains(&x)));
        let c = MfState::new(&inst, &SolverParams { seed: 1, ..p });
        assert_ne!(a.v(), c.v());
    }

    #[test]
    fn delta_e_at_symmetric_point() {
        let inst = example_instance();
        let state = MfState::new(&inst, &params(0.0));
        let de = state.delta_e(&inst, 0, 1.0, PenaltyMode::Multilinear);
        assert!((de - (-0.3)).abs() < 1e-12);
    }

    #[test]
    fn delta_e_single_cell_is_zero() {
        let inst = ScpInstance::new(1, 1, vec![4.0], [(0, 0)]).unwrap();
        let mut state = MfState::new(&inst, &params(0.0));
        for v in [0.1, 0.5, 0.9] {
            state.set_v(&inst, &params(0.0), &[v]);
            assert_eq!(state.delta_e(&inst, 0, 1.0, PenaltyMode::Multilinear), 0.0);
        }
    }

    #[test]
    fn piecewise_delta_e_is_two_point_difference() {
        let inst = example_instance();
        let p = SolverParams {
            penalty_mode: PenaltyMode::Piecewise,
            ..params(0.0)
        };
        let mut state = MfState::new(&inst, &p);
        let v = [0.2, 0.7, 0.1, 0.4, 0.3];
        state.set_v(&inst, &p, &v);
        for i in 0..5 {
            let mut hi = v;
            hi[i] = 1.0;
            let mut lo = v;
            lo[i] = 0.0;
            let diff = inst.energy(&hi, 1.0, PenaltyMode::Piecewise).unwrap()
                - inst.energy(&lo, 1.0, PenaltyMode::Piecewise).unwrap();
            let de = state.delta_e(&inst, i, 1.0, PenaltyMode::Piecewise);
            assert!((de - diff).abs() < 1e-12, "column {i}: {de} vs {diff}");
        }
    }

    #[test]
    fn truncation_zeroes_small_factors() {
        let inst = example_instance();
        let p = SolverParams {
            trunc_eps: 0.05,
            ..params(0.0)
        };
        let mut state = MfState::new(&inst, &p);
        let v = [0.5, 0.01, 0.5, 0.5, 0.02];
        state.set_v(&inst, &p, &v);
        // Column 1 (0-based 0) sits in rows 0 and 2; columns 1 and 4 count as zero.
        let expected = 0.2 - (0.5 + 1.0);
        let de = state.delta_e(&inst, 0, 1.0, PenaltyMode::Multilinear);
        assert!((de - expected).abs() < 1e-12);
        let untruncated = MfState::new(&inst, &params(0.0));
        let mut plain = untruncated.clone();
        plain.set_v(&inst, &params(0.0), &v);
        assert!(plain.delta_e(&inst, 0, 1.0, PenaltyMode::Multilinear) > de);
    }

    #[test]
    fn update_values() {
        let inst = ScpInstance::new(1, 1, vec![1.0], [(0, 0)]).unwrap();
        let mut p = params(0.0);
        let mut state = MfState::new(&inst, &p);
        // c = 1, alpha = 1: delta_e = 0.
        state.set_v(&inst, &p, &[0.8]);
        let change = state.update_variable(&inst, 0, &p);
        assert_eq!(state.v()[0], 0.5);
        assert!((change - 0.3).abs() < 1e-12);

        // delta_e = 1 - 1.3 = -0.3 at T = 0.1.
        p.alpha = 1.3;
        state.temperature = 0.1;
        state.update_variable(&inst, 0, &p);
        assert!((state.v()[0] - 0.952_574_126_822_433_4).abs() < 1e-12);

        state.temperature = 1e12;
        state.update_variable(&inst, 0, &p);
        assert!((state.v()[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn extreme_fields_stay_clamped() {
        let inst = ScpInstance::new(1, 1, vec![1.0], [(0, 0)]).unwrap();
        let mut p = params(0.0);
        p.alpha = 0.0;
        let mut state = MfState::new(&inst, &p);
        state.temperature = 1e-300;
        state.update_variable(&inst, 0, &p);
        assert_eq!(state.v()[0], V_MIN);
        p.alpha = 5.0;
        state.update_variable(&inst, 0, &p);
        assert_eq!(state.v()[0], V_MAX);
        assert!(state.cache_error(&inst) < 1e-9);
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation(&[0.5; 4]), 0.0);
        assert_eq!(saturation(&[0.0, 1.0, 1.0]), 1.0);
        assert_eq!(saturation(&[0.5, 1.0]), 0.5);
    }

    #[test]
    fn single_column_sweep() {
        let inst = ScpInstance::new(1, 1, vec![1.0], [(0, 0)]).unwrap();
        let p = params(0.001);
        let mut state = MfState::new(&inst, &p);
        let v0 = state.v()[0];
        let first = state.sweep(&inst, &p);
        assert!((first - (v0 - 0.5).abs()).abs() < 1e-15);
        assert_eq!(state.sweep(&inst, &p), 0.0);
    }

    #[test]
    fn sweep_updates_each_variable_once() {
        // With all-zero costs and no penalty every update lands on exactly 0.5,
        // so the mean change equals the mean distance from 0.5 at sweep start.
        let inst = crate::generate::hypercube_cycles(4);
        let p = SolverParams {
            alpha: 0.0,
            init_halfwidth: 0.3,
            ..SolverParams::default()
        };
        let zero_cost =
            ScpInstance::new(inst.n_rows(), inst.n_cols(), vec![0.0; inst.n_cols()], {
                inst.rows()
                    .iter()
                    .enumerate()
                    .flat_map(|(k, r)| r.iter().map(move |&i| (k, i as usize)))
                    .collect::<Vec<_>>()
            })
            .unwrap();
        let mut state = MfState::new(&zero_cost, &p);
        let expected: f64 =
            state.v().iter().map(|x| (x - 0.5).abs()).sum::<f64>() / state.v().len() as f64;
        let got = state.sweep(&zero_cost, &p);
        assert!((got - expected).abs() < 1e-15);
        assert!(state.v().iter().all(|&x| x == 0.5));
    }
}
