//! The isolate-then-detect engine.
//!
//! A working segment `[s, e]` is scanned through its interleaved right- and
//! left-expanding intervals. The first interval whose best aggregated
//! contrast clears the acceptance rule yields a change-point; the scan then
//! restarts on the part of the segment beyond that interval. A segment whose
//! schedule is exhausted without a detection is dropped.

mod calibrate;
mod permutation;
mod schedule;
mod sparsity;
mod threshold;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use calibrate::{calibrate_constants, max_schedule_score, CalibratedConstant, CalibrationSpec};
pub use permutation::{mid_perm, permutation_scan};
pub use schedule::{interval_schedule, ExpandingInterval, Side};
pub use sparsity::{estimate_sparsity, mid_opt, SparsityEstimate, DENSE_CUTOFF, SPARSE_CUTOFF};
pub use threshold::{
    threshold, threshold_for_alpha, threshold_rate, univariate_threshold, ThresholdEntry,
    ThresholdTable, AUDIT_HEADER, MAX_TABULATED_DIM,
};

use crate::aggregate::{aggregate_unchecked, argmax_first};
use crate::config::{DetectionConfig, Norm, NormPolicy};
use crate::contrast::block_contrasts;
use crate::error::{MidError, Result};
use crate::report::{ChangePointReport, DetectedPoint};
use crate::series::{Interval, MultiSeries, Scenario};

/// The best candidate of a scanned interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub location: usize,
    pub value: f64,
    /// 1-based component with the largest contrast at `location`.
    pub component: usize,
}

/// How a working segment came to be scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Initial,
    /// Remainder after a detection in a right-expanding interval.
    AfterRight,
    /// Remainder after a detection in a left-expanding interval.
    AfterLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkInterval {
    pub s: usize,
    pub e: usize,
    pub provenance: Provenance,
}

/// Reusable buffers for contrast evaluation.
#[derive(Debug, Default)]
pub(crate) struct Scanner {
    scratch: Vec<f64>,
    contrasts: Vec<f64>,
    scores: Vec<f64>,
}

impl Scanner {
    /// Aggregated scores of a time-major block; returns the best row and its score.
    pub(crate) fn best(
        &mut self,
        block: &[f64],
        n: usize,
        dim: usize,
        scenario: Scenario,
        norm: Norm,
    ) -> Option<(usize, f64)> {
        if n < scenario.min_interval_len() {
            return None;
        }
        block_contrasts(
            block,
            n,
            dim,
            scenario,
            &mut self.scratch,
            &mut self.contrasts,
        );
        self.scores.clear();
        self.scores.extend(
            self.contrasts
                .chunks_exact(dim)
                .map(|row| aggregate_unchecked(row, norm)),
        );
        argmax_first(&self.scores).map(|i| (i, self.scores[i]))
    }

    /// Component with the largest contrast in row `i` of the last block.
    pub(crate) fn top_component(&self, i: usize, dim: usize) -> usize {
        argmax_first(&self.contrasts[i * dim..(i + 1) * dim]).map_or(1, |j| j + 1)
    }

    /// Best candidate of `interval` regardless of any threshold.
    pub(crate) fn best_hit(
        &mut self,
        series: &MultiSeries,
        interval: Interval,
        scenario: Scenario,
        norm: Norm,
    ) -> Option<Hit> {
        let dim = series.dim();
        let (first, _) = scenario.candidate_range(interval)?;
        let (i, value) = self.best(series.rows(interval), interval.len(), dim, scenario, norm)?;
        Some(Hit {
            location: first + i,
            value,
            component: self.top_component(i, dim),
        })
    }
}

/// Tests one interval against `zeta`: returns the argmax candidate when its
/// aggregated contrast strictly exceeds `zeta`.
pub fn scan_interval(
    series: &MultiSeries,
    interval: Interval,
    scenario: Scenario,
    norm: Norm,
    zeta: f64,
) -> Option<Hit> {
    if interval.s == 0 || interval.e > series.len() || interval.s > interval.e {
        return None;
    }
    Scanner::default()
        .best_hit(series, interval, scenario, norm)
        .filter(|hit| hit.value > zeta)
}

/// Runs the worklist over `[1, T]`, calling `scan` on every expanding
/// interval long enough to hold a candidate.
pub(crate) fn run_worklist<F>(
    series: &MultiSeries,
    scenario: Scenario,
    lambda: usize,
    mut scan: F,
) -> Result<Vec<DetectedPoint>>
where
    F: FnMut(Interval) -> Option<Hit>,
{
    let mut pending = vec![WorkInterval {
        s: 1,
        e: series.len(),
        provenance: Provenance::Initial,
    }];
    let mut found = BTreeSet::new();
    let mut points = Vec::new();
    let min_len = scenario.min_interval_len();

    while let Some(work) = pending.pop() {
        if work.e - work.s + 1 < min_len {
            continue;
        }
        for step in interval_schedule(work.s, work.e, lambda)? {
            let iv = step.interval;
            if iv.len() < min_len {
                continue;
            }
            let Some(hit) = scan(iv) else { continue };
            assert!(
                found.insert(hit.location),
                "change-point {} detected twice",
                hit.location
            );
            points.push(DetectedPoint {
                location: hit.location,
                interval: iv,
                value: hit.value,
                component: hit.component,
                affected: Vec::new(),
            });
            let next = match step.side {
                Side::Right => WorkInterval {
                    s: iv.e,
                    e: work.e,
                    provenance: Provenance::AfterRight,
                },
                Side::Left => WorkInterval {
                    s: work.s,
                    e: iv.s,
                    provenance: Provenance::AfterLeft,
                },
            };
            if next.s < next.e {
                pending.push(next);
            }
            break;
        }
    }
    Ok(points)
}

fn check_length(series: &MultiSeries, scenario: Scenario) -> Result<()> {
    let min = scenario.min_interval_len();
    if series.len() < min {
        return Err(MidError::TooShort {
            len: series.len(),
            min,
        });
    }
    Ok(())
}

/// Threshold-based detection with a fixed norm and threshold `zeta`.
pub fn mid_detect(
    series: &MultiSeries,
    cfg: &DetectionConfig,
    norm: Norm,
    zeta: f64,
) -> Result<ChangePointReport> {
    if cfg.lambda == 0 {
        return Err(MidError::ZeroLambda);
    }
    check_length(series, cfg.scenario)?;
    let mut scanner = Scanner::default();
    let points = run_worklist(series, cfg.scenario, cfg.lambda, |iv| {
        scanner
            .best_hit(series, iv, cfg.scenario, norm)
            .filter(|hit| hit.value > zeta)
    })?;
    Ok(ChangePointReport::from_points(points, norm, Some(zeta)))
}

/// Default threshold for `norm` under `cfg` and the series' `T` and `d`.
pub fn default_threshold(series: &MultiSeries, cfg: &DetectionConfig, norm: Norm) -> Result<f64> {
    threshold(
        cfg.scenario,
        norm,
        cfg.alpha,
        series.len(),
        series.dim(),
        cfg.threshold_constant_override,
    )
}

/// Runs the detector selected by `cfg.norm`.
pub fn detect(series: &MultiSeries, cfg: &DetectionConfig) -> Result<ChangePointReport> {
    cfg.validate()?;
    match cfg.norm {
        NormPolicy::L2 | NormPolicy::LInf => {
            let norm = if cfg.norm == NormPolicy::L2 {
                Norm::L2
            } else {
                Norm::LInf
            };
            let zeta = default_threshold(series, cfg, norm)?;
            mid_detect(series, cfg, norm, zeta)
        }
        NormPolicy::Auto => mid_opt(series, cfg),
        NormPolicy::PermL2 | NormPolicy::PermLInf => mid_perm(series, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::validate_series;

    pub(crate) fn mean_example() -> MultiSeries {
        let f1: Vec<f64> = (1..=200)
            .map(|t| if (28..=165).contains(&t) { 6.0 } else { 0.0 })
            .collect();
        let f2: Vec<f64> = (1..=200)
            .map(|t| if (74..=165).contains(&t) { -6.0 } else { 0.0 })
            .collect();
        MultiSeries::from_columns(&[f1, f2, vec![0.0; 200]]).unwrap()
    }

    pub(crate) fn slope_example() -> MultiSeries {
        let f1: Vec<f64> = (1..=200i64)
            .map(|t| match t {
                ..=53 => -t + 1,
                54..=124 => 2 * t - 158,
                _ => -t + 214,
            } as f64)
            .collect();
        let f2: Vec<f64> = (1..=200i64)
            .map(|t| match t {
                ..=100 => -t + 1,
                101..=124 => 2 * t - 299,
                _ => -t + 73,
            } as f64)
            .collect();
        let f3: Vec<f64> = (1..=200).map(|t| t as f64).collect();
        MultiSeries::from_columns(&[f1, f2, f3]).unwrap()
    }

    fn linf_default(series: &MultiSeries, scenario: Scenario) -> ChangePointReport {
        let cfg = DetectionConfig::new(scenario, NormPolicy::LInf);
        detect(series, &cfg).unwrap()
    }

    #[test]
    fn noiseless_mean_example() {
        let report = linf_default(&mean_example(), Scenario::PiecewiseConstant);
        assert_eq!(report.changepoints, vec![27, 73, 165]);
        let ivs: Vec<(usize, Interval)> = report
            .per_point
            .iter()
            .map(|p| (p.location, p.interval))
            .collect();
        assert_eq!(ivs[0], (27, Interval { s: 1, e: 30 }));
        assert_eq!(ivs[2], (165, Interval { s: 161, e: 200 }));
        // the segment restarts at 30, so the third detection interval is
        // [30, 79] on the per-segment grid
        assert_eq!(ivs[1], (73, Interval { s: 30, e: 79 }));
        assert_eq!(report.per_point[0].component, 1);
        assert_eq!(report.per_point[1].component, 2);
        for p in &report.per_point {
            assert!(p.value > report.threshold.unwrap());
        }
    }

    #[test]
    fn noiseless_mean_example_l2() {
        let cfg = DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::L2);
        let report = detect(&mean_example(), &cfg).unwrap();
        assert_eq!(report.changepoints, vec![27, 73, 165]);
    }

    #[test]
    fn noiseless_slope_example() {
        let report = linf_default(&slope_example(), Scenario::PiecewiseLinear);
        assert_eq!(report.changepoints, vec![53, 100, 124]);
    }

    #[test]
    fn scan_interval_examples() {
        let series = mean_example();
        let hit = scan_interval(
            &series,
            Interval { s: 1, e: 30 },
            Scenario::PiecewiseConstant,
            Norm::LInf,
            1.0,
        )
        .unwrap();
        assert_eq!((hit.location, hit.component), (27, 1));
        assert!(scan_interval(
            &series,
            Interval { s: 1, e: 30 },
            Scenario::PiecewiseConstant,
            Norm::LInf,
            hit.value,
        )
        .is_none());

        let zero = validate_series(&vec![vec![0.0; 4]; 50]).unwrap();
        for norm in [Norm::L2, Norm::LInf] {
            assert!(scan_interval(
                &zero,
                Interval { s: 3, e: 40 },
                Scenario::PiecewiseConstant,
                norm,
                1e-12
            )
            .is_none());
        }
    }

    #[test]
    fn scan_ties_pick_smallest_candidate() {
        // symmetric bump: |CUSUM| is equal at b = 2 and b = 4
        let x = vec![vec![0.0], vec![0.0], vec![1.0], vec![0.0], vec![0.0]];
        let series = validate_series(&x).unwrap();
        let m = crate::contrast::contrast_matrix(
            &series,
            Interval { s: 1, e: 5 },
            Scenario::PiecewiseConstant,
        )
        .unwrap();
        assert!((m.get(1, 1) - m.get(2, 1)).abs() < 1e-15);
        let hit = scan_interval(
            &series,
            Interval { s: 1, e: 5 },
            Scenario::PiecewiseConstant,
            Norm::L2,
            0.0,
        )
        .unwrap();
        assert_eq!(hit.location, 2);
    }

    #[test]
    fn infinite_threshold_gives_empty_report() {
        let zero = validate_series(&vec![vec![0.0; 2]; 40]).unwrap();
        let cfg = DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::LInf);
        let report = mid_detect(&zero, &cfg, Norm::LInf, f64::INFINITY).unwrap();
        assert!(report.is_empty());
        let report = mid_detect(&mean_example(), &cfg, Norm::LInf, f64::INFINITY).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn rejects_short_series_for_slopes() {
        let s = validate_series(&[vec![1.0], vec![2.0]]).unwrap();
        let cfg = DetectionConfig::new(Scenario::PiecewiseLinear, NormPolicy::L2);
        assert!(matches!(
            detect(&s, &cfg),
            Err(MidError::TooShort { len: 2, min: 3 })
        ));
    }

    #[test]
    fn raising_threshold_never_adds_first_segment_detections() {
        let series = mean_example();
        let cfg = DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::LInf);
        let mut last = usize::MAX;
        for zeta in [0.5, 2.0, 5.0, 9.0, 12.0, 20.0, 40.0] {
            let report = mid_detect(&series, &cfg, Norm::LInf, zeta).unwrap();
            assert!(report.len() <= last);
            last = report.len();
        }
        assert_eq!(last, 0);
    }
}
