//! Monte-Carlo tuning of threshold constants on pure-noise panels.
//!
//! On a panel with no change-points the detector returns nothing exactly when
//! no interval of the first schedule over `[1, T]` clears the threshold. So a
//! panel's outcome for every constant `C` follows from one number: the largest
//! aggregated contrast across that schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{Alpha, Norm};
use crate::error::{MidError, Result};
use crate::series::{MultiSeries, Scenario};
use crate::stream_seed;

use super::threshold::{threshold_rate, ThresholdEntry};
use super::{interval_schedule, Scanner};

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSpec {
    pub scenario: Scenario,
    pub norm: Norm,
    pub alpha: Alpha,
    pub t_values: Vec<usize>,
    pub dims: Vec<usize>,
    /// Null panels per `(T, d)` pair.
    pub reps: usize,
    /// Candidate constants, positive and increasing.
    pub grid: Vec<f64>,
    pub seed: u64,
    pub lambda: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedConstant {
    pub dim: usize,
    pub constant: f64,
    /// Panels with no detection at `constant`.
    pub no_detection: usize,
    pub panels: usize,
}

impl CalibratedConstant {
    pub fn entry(&self, spec: &CalibrationSpec) -> ThresholdEntry {
        ThresholdEntry {
            scenario: spec.scenario,
            norm: spec.norm,
            alpha: spec.alpha,
            dim: self.dim,
            constant: self.constant,
        }
    }
}

/// Largest aggregated contrast over the schedule of `[1, T]`.
pub fn max_schedule_score(
    series: &MultiSeries,
    scenario: Scenario,
    norm: Norm,
    lambda: usize,
) -> Result<f64> {
    let mut scanner = Scanner::default();
    let mut best: f64 = 0.0;
    for step in interval_schedule(1, series.len(), lambda)? {
        if let Some(hit) = scanner.best_hit(series, step.interval, scenario, norm) {
            best = best.max(hit.value);
        }
    }
    Ok(best)
}

fn null_panel(t_len: usize, dim: usize, seed: u64) -> MultiSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..t_len * dim)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    MultiSeries::from_time_major(values, t_len, dim).expect("finite gaussian panel")
}

fn validate(spec: &CalibrationSpec) -> Result<()> {
    let bad = |msg: &str| Err(MidError::InvalidConfig(msg.to_string()));
    if spec.reps == 0 {
        return bad("calibration needs at least one replicate");
    }
    if spec.grid.is_empty() {
        return bad("candidate grid is empty");
    }
    if spec.grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return bad("candidate constants must be positive");
    }
    if spec.grid.windows(2).any(|w| w[0] >= w[1]) {
        return bad("candidate grid must be strictly increasing");
    }
    if spec.t_values.is_empty()
        || spec
            .t_values
            .iter()
            .any(|&t| t < spec.scenario.min_interval_len())
    {
        return bad("series lengths are missing or too short");
    }
    if spec.dims.is_empty() || spec.dims.contains(&0) {
        return bad("dimensions must be positive");
    }
    if spec.lambda == 0 {
        return Err(MidError::ZeroLambda);
    }
    Ok(())
}

/// For each dimension, the grid constant whose no-detection count over the
/// null panels is closest to `(1 - alpha)` times the number of panels.
/// Ties go to the larger constant.
pub fn calibrate_constants(spec: &CalibrationSpec) -> Result<Vec<CalibratedConstant>> {
    validate(spec)?;
    let mut out = Vec::with_capacity(spec.dims.len());
    for &dim in &spec.dims {
        // (max score, threshold rate) per panel
        let mut stats = Vec::with_capacity(spec.reps * spec.t_values.len());
        for &t_len in &spec.t_values {
            let rate = threshold_rate(t_len, dim);
            let scores: Vec<f64> = (0..spec.reps)
                .into_par_iter()
                .map(|rep| {
                    let seed = stream_seed(spec.seed, &[dim as u64, t_len as u64, rep as u64]);
                    let panel = null_panel(t_len, dim, seed);
                    max_schedule_score(&panel, spec.scenario, spec.norm, spec.lambda)
                })
                .collect::<Result<_>>()?;
            stats.extend(scores.into_iter().map(|s| (s, rate)));
        }
        let panels = stats.len();
        let target = (1.0 - spec.alpha.value()) * panels as f64;
        let mut best: Option<CalibratedConstant> = None;
        for &c in &spec.grid {
            let quiet = stats
                .iter()
                .filter(|(score, rate)| score.is_nan() || *score <= c * rate)
                .count();
            let gap = (quiet as f64 - target).abs();
            let better = match &best {
                None => true,
                Some(b) => gap <= (b.no_detection as f64 - target).abs(),
            };
            if better {
                best = Some(CalibratedConstant {
                    dim,
                    constant: c,
                    no_detection: quiet,
                    panels,
                });
            }
        }
        out.extend(best);
    }
    Ok(out)
}
