//! Multi-trial evaluation: best/average cost, relative deviation from
//! published reference values, and per-sweep timing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::instance::ScpInstance;
use crate::mf::{solve, MfState, Overrides, ParamError, SolverParams};
use crate::solution::Solution;

pub const DEFAULT_TRIALS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("need at least 4 instances spanning 8x in nnz (got {points} spanning {spread:.2}x)")]
    InsufficientData { points: usize, spread: f64 },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("all {0} trials failed: {1}")]
    AllTrialsFailed(usize, ParamError),
}

/// Published optimum or best known value, plus the best and average
/// mean-field costs over ten trials reported alongside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reference {
    pub name: &'static str,
    pub value: f64,
    pub published_best: f64,
    pub published_avg: f64,
}

macro_rules! refs {
    ($($name:literal $value:literal $best:literal $avg:literal;)*) => {
        &[$(Reference { name: $name, value: $value as f64, published_best: $best as f64, published_avg: $avg as f64 }),*]
    };
}

static REFERENCES: &[Reference] = refs! {
    "4.1" 429 435 435.6; "4.2" 512 517 518.0; "4.3" 516 531 532.7; "4.4" 494 512 520.9;
    "4.5" 512 522 524.1; "4.6" 560 566 567.8; "4.7" 430 446 446.0; "4.8" 492 492 493.8;
    "4.9" 641 658 661.4; "4.10" 514 521 521.0;
    "5.1" 253 260 268.6; "5.2" 302 316 316.0; "5.3" 226 229 229.0; "5.4" 242 247 247.5;
    "5.5" 211 214 214.3; "5.6" 213 213 213.2; "5.7" 293 304 305.0; "5.8" 288 299 300.1;
    "5.9" 279 281 281.0; "5.10" 265 273 274.0;
    "6.1" 138 143 143.0; "6.2" 146 153 153.2; "6.3" 145 150 150.2; "6.4" 131 132 133.1;
    "6.5" 161 169 169.8;
    "A.1" 253 260 261.5; "A.2" 252 257 258.3; "A.3" 232 238 241.3; "A.4" 234 238 239.7;
    "A.5" 236 238 238.9;
    "B.1" 69 70 71.2; "B.2" 76 77 77.6; "B.3" 80 83 83.7; "B.4" 79 80 80.0; "B.5" 72 72 72.0;
    "C.1" 227 233 233.6; "C.2" 219 222 224.3; "C.3" 243 249 251.1; "C.4" 219 220 220.1;
    "C.5" 215 219 219.1;
    "D.1" 60 64 64.6; "D.2" 66 66 66.3; "D.3" 72 73 75.1; "D.4" 62 63 63.0; "D.5" 61 64 64.6;
    "NRE.1" 29 29 29.5; "NRE.2" 30 32 32.1; "NRE.3" 27 28 28.2; "NRE.4" 28 29 29.7;
    "NRE.5" 28 29 29.0;
    "NRF.1" 14 14 14.9; "NRF.2" 15 15 15.4; "NRF.3" 14 15 15.2; "NRF.4" 14 15 15.4;
    "NRF.5" 13 14 14.7;
    "NRG.1" 176 180 180.1; "NRG.2" 155 157 159.0; "NRG.3" 166 173 174.9; "NRG.4" 168 175 176.3;
    "NRG.5" 168 175 176.9;
    "NRH.1" 64 65 66.4; "NRH.2" 64 66 67.0; "NRH.3" 59 62 62.8; "NRH.4" 58 60 61.8;
    "NRH.5" 55 56 56.4;
    "Rail507" 174 187 188.2; "Rail516" 211 186 187.9; "Rail582" 182 222 225.5;
    "Rail2536" 691 737 740.0; "Rail2586" 951 1018 1026.7; "Rail4284" 1065 1152 1162.1;
    "Rail4872" 1534 1640 1643.5;
    "E.1" 5 5 5.3; "E.2" 5 5 5.0; "E.3" 5 5 5.0; "E.4" 5 5 5.0; "E.5" 5 5 5.0;
    "CYC.6" 60 62 63.0; "CYC.7" 144 151 153.4; "CYC.8" 344 348 352.1; "CYC.9" 780 829 832.6;
    "CYC.10" 1792 1870 1882.3; "CYC.11" 4103 4240 4248.7;
    "CLR.10" 25 27 29.0; "CLR.11" 23 26 28.9; "CLR.12" 26 30 30.9; "CLR.13" 26 31 32.9;
    "STS.45" 30 31 31.8; "STS.81" 61 63 63.9; "STS.135" 104 105 107.4; "STS.243" 202 205 206.8;
};

pub fn reference_table() -> &'static [Reference] {
    REFERENCES
}

pub fn reference_value(name: &str) -> Option<f64> {
    REFERENCES.iter().find(|r| r.name == name).map(|r| r.value)
}

/// Maps an OR-Library file stem to its table name: `scp41` -> `4.1`,
/// `scpnre1` -> `NRE.1`, `scpcyc06` -> `CYC.6`, `rail507` -> `Rail507`.
pub fn benchmark_name(stem: &str) -> Option<String> {
    let stem = stem.to_ascii_lowercase();
    if let Some(num) = stem.strip_prefix("rail") {
        return (!num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()))
            .then(|| format!("Rail{num}"));
    }
    let body = stem.strip_prefix("scp")?;
    let split = body.find(|c: char| c.is_ascii_digit())?;
    let (set, num) = body.split_at(split);
    if !num.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num = num.trim_start_matches('0');
    match set {
        "" => {
            // Numeric sets are a single digit followed by the problem number.
            let (set, rest) = body.split_at(1);
            let rest = rest.trim_start_matches('0');
            (!rest.is_empty()).then(|| format!("{set}.{rest}"))
        }
        _ if num.is_empty() => None,
        set => Some(format!("{}.{num}", set.to_ascii_uppercase())),
    }
}

/// Problem set of a table name: `4.1` -> `4`, `Rail507` -> `Rail`.
pub fn set_name(name: &str) -> &str {
    if let Some((set, _)) = name.split_once('.') {
        set
    } else {
        name.trim_end_matches(|c: char| c.is_ascii_digit())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub cost: Option<f64>,
    pub feasible: bool,
    pub seconds: f64,
    pub sweeps: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub nnz: usize,
    pub reference: Option<f64>,
    /// Best feasible cost, or best infeasible cost when no trial was feasible.
    pub best_cost: f64,
    pub avg_cost: f64,
    pub all_feasible: bool,
    pub trials: Vec<TrialRecord>,
    pub rel_deviation: Option<f64>,
    pub avg_rel_deviation: Option<f64>,
    #[serde(skip)]
    pub best: Solution,
}

/// Runs `n_trials` solves with seeds `base_seed..base_seed + n_trials`.
pub fn run_trials(
    instance: &ScpInstance,
    name: &str,
    n_trials: usize,
    base_seed: u64,
    overrides: &Overrides,
) -> Result<InstanceReport, BenchError> {
    if n_trials == 0 {
        return Err(BenchError::NoTrials);
    }
    let results: Vec<(u64, Result<Solution, ParamError>)> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = base_seed.wrapping_add(t);
            let o = Overrides {
                seed,
                ..overrides.clone()
            };
            (seed, solve(instance, &o))
        })
        .collect();

    let mut trials = Vec::with_capacity(n_trials);
    let mut solutions = Vec::with_capacity(n_trials);
    let mut first_error = None;
    for (seed, result) in results {
        match result {
            Ok(sol) => {
                trials.push(TrialRecord {
                    seed,
                    cost: Some(sol.cost),
                    feasible: sol.feasible,
                    seconds: sol.wall_seconds,
                    sweeps: sol.sweeps,
                    error: None,
                });
                solutions.push(sol);
            }
            Err(e) => {
                trials.push(TrialRecord {
                    seed,
                    cost: None,
                    feasible: false,
                    seconds: 0.0,
                    sweeps: 0,
                    error: Some(e.to_string()),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    let Some(best_idx) = crate::solution::best_index(&solutions) else {
        return Err(BenchError::AllTrialsFailed(
            n_trials,
            first_error.expect("no solutions implies an error"),
        ));
    };
    let best = solutions[best_idx].clone();
    let avg_cost = solutions.iter().map(|s| s.cost).sum::<f64>() / solutions.len() as f64;
    let reference = reference_value(name);
    let deviation = |x: f64| reference.filter(|r| *r > 0.0).map(|r| (x - r) / r);
    Ok(InstanceReport {
        name: name.to_string(),
        rows: instance.n_rows(),
        cols: instance.n_cols(),
        density: instance.density(),
        nnz: instance.nnz(),
        reference,
        best_cost: best.cost,
        avg_cost,
        all_feasible: solutions.len() == n_trials && solutions.iter().all(|s| s.feasible),
        trials,
        rel_deviation: deviation(best.cost),
        avg_rel_deviation: deviation(avg_cost),
        best,
    })
}

impl InstanceReport {
    /// Replaces the reference value and recomputes both deviations.
    pub fn with_reference(mut self, reference: Option<f64>) -> Self {
        let deviation = |x: f64| reference.filter(|r| *r > 0.0).map(|r| (x - r) / r);
        self.reference = reference;
        self.rel_deviation = deviation(self.best_cost);
        self.avg_rel_deviation = deviation(self.avg_cost);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub set: String,
    pub problems: usize,
    /// Mean of per-problem best-of-trials relative deviation, in percent.
    pub mean_rel_deviation_pct: f64,
    /// Same, using the per-problem average cost.
    pub mean_avg_rel_deviation_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub trials: usize,
    pub instances: Vec<InstanceReport>,
    pub sets: Vec<SetSummary>,
}

impl BenchReport {
    pub fn new(trials: usize, instances: Vec<InstanceReport>) -> Self {
        let mut groups: BTreeMap<String, Vec<&InstanceReport>> = BTreeMap::new();
        for r in &instances {
            if r.rel_deviation.is_some() {
                groups.entry(set_name(&r.name).to_string()).or_default().push(r);
            }
        }
        let sets = groups
            .into_iter()
            .map(|(set, rs)| {
                let n = rs.len() as f64;
                SetSummary {
                    problems: rs.len(),
                    mean_rel_deviation_pct: 100.0
                        * rs.iter().filter_map(|r| r.rel_deviation).sum::<f64>()
                        / n,
                    mean_avg_rel_deviation_pct: 100.0
                        * rs.iter().filter_map(|r| r.avg_rel_deviation).sum::<f64>()
                        / n,
                    set,
                }
            })
            .collect();
        Self {
            trials,
            instances,
            sets,
        }
    }

    /// Aligned text table. Timing columns are omitted when `timing` is false.
    pub fn to_text(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{:<10} {:>6} {:>8} {:>7} {:>9} {:>9} {:>9} {:>10} {:>9} {:>8}",
            "problem", "rows", "cols", "dens%", "reference", "best", "average", "rel.dev%", "published", "feasible"
        );
        if timing {
            let _ = write!(out, " {:>9}", "avg.sec");
        }
        out.push('\n');
        for r in &self.instances {
            let reference = r.reference.map_or("-".to_string(), |v| format!("{v}"));
            let dev = r
                .rel_deviation
                .map_or("-".to_string(), |d| format!("{:.2}", 100.0 * d));
            let published = REFERENCES
                .iter()
                .find(|x| x.name == r.name)
                .map_or("-".to_string(), |x| format!("{}", x.published_best));
            let _ = write!(
                out,
                "{:<10} {:>6} {:>8} {:>7.2} {:>9} {:>9} {:>9.1} {:>10} {:>9} {:>8}",
                r.name,
                r.rows,
                r.cols,
                100.0 * r.density,
                reference,
                r.best_cost,
                r.avg_cost,
                dev,
                published,
                if r.all_feasible { "yes" } else { "no" }
            );
            if timing {
                let secs = r.trials.iter().map(|t| t.seconds).sum::<f64>() / r.trials.len() as f64;
                let _ = write!(out, " {secs:>9.3}");
            }
            out.push('\n');
        }
        if !self.sets.is_empty() {
            out.push('\n');
            let _ = writeln!(out, "{:<10} {:>8} {:>10} {:>10}", "set", "problems", "rel.dev%", "avg.dev%");
            for s in &self.sets {
                let _ = writeln!(
                    out,
                    "{:<10} {:>8} {:>10.2} {:>10.2}",
                    s.set, s.problems, s.mean_rel_deviation_pct, s.mean_avg_rel_deviation_pct
                );
            }
        }
        out
    }

    /// One line per instance, with a header.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from(
            "problem,rows,cols,density,nnz,reference,best,average,rel_deviation,avg_rel_deviation,all_feasible",
        );
        if timing {
            out.push_str(",avg_seconds");
        }
        out.push('\n');
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for r in &self.instances {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.name,
                r.rows,
                r.cols,
                r.density,
                r.nnz,
                opt(r.reference),
                r.best_cost,
                r.avg_cost,
                opt(r.rel_deviation),
                opt(r.avg_rel_deviation),
                r.all_feasible
            );
            if timing {
                let secs = r.trials.iter().map(|t| t.seconds).sum::<f64>() / r.trials.len() as f64;
                let _ = write!(out, ",{secs}");
            }
            out.push('\n');
        }
        out
    }
}

/// Median wall time of one sweep, over `batches` batches of `sweeps_per_batch` sweeps.
///
/// Runs far above the critical temperature, where no variable sits at its clamp,
/// so every update rescales its rows and the cost depends on structure only.
pub fn measure_sweep_seconds(instance: &ScpInstance, sweeps_per_batch: usize, batches: usize) -> f64 {
    let params = SolverParams {
        t0: 1e3,
        ..SolverParams::default()
    };
    let mut state = MfState::new(instance, &params);
    state.sweep(instance, &params);
    let mut times: Vec<f64> = (0..batches.max(1))
        .map(|_| {
            let start = Instant::now();
            for _ in 0..sweeps_per_batch.max(1) {
                std::hint::black_box(state.sweep(instance, &params));
            }
            start.elapsed().as_secs_f64() / sweeps_per_batch.max(1) as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

/// Least-squares slope of `ln(seconds)` against `ln(nnz)`.
pub fn timing_scaling(points: &[(usize, f64)]) -> Result<f64, BenchError> {
    let lo = points.iter().map(|p| p.0).min().unwrap_or(0);
    let hi = points.iter().map(|p| p.0).max().unwrap_or(0);
    let spread = if lo == 0 { 0.0 } else { hi as f64 / lo as f64 };
    if points.len() < 4 || spread < 8.0 || points.iter().any(|p| p.1.is_nan() || p.1 <= 0.0) {
        return Err(BenchError::InsufficientData {
            points: points.len(),
            spread,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
