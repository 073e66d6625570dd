//! Sparsity estimation and the sparsity-adaptive choice of norm.

use crate::config::{Alpha, DetectionConfig, Norm};
use crate::contrast::component_contrast;
use crate::error::{MidError, Result};
use crate::report::ChangePointReport;
use crate::series::{Interval, MultiSeries, Scenario};

use super::threshold::univariate_threshold;
use super::{default_threshold, mid_detect};

/// Estimated sparsity at or below this keeps the `LInf` result.
pub const SPARSE_CUTOFF: f64 = 0.4;
/// Estimated sparsity at or above this switches to `L2`.
pub const DENSE_CUTOFF: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityEstimate {
    /// Largest per-candidate share of components exceeding the univariate threshold.
    pub sparsity: f64,
    /// For each candidate, the 1-based components that exceed it.
    pub affected: Vec<Vec<usize>>,
}

/// Estimates the share of components carrying each candidate change.
///
/// Candidate `r_m` is tested on `[r_{m-1} + 1, r_{m+1}]` with `r_0 = 0` and
/// `r_{M+1} = T`; each component's contrast is compared with the univariate
/// threshold `C * sqrt(log T)`.
pub fn estimate_sparsity(
    series: &MultiSeries,
    candidates: &[usize],
    scenario: Scenario,
    alpha: Alpha,
) -> Result<SparsityEstimate> {
    if candidates.is_empty() {
        return Err(MidError::EmptyCandidates);
    }
    let t_len = series.len();
    for (i, &c) in candidates.iter().enumerate() {
        if c == 0 || c >= t_len || (i > 0 && candidates[i - 1] >= c) {
            return Err(MidError::BadCandidate(c));
        }
    }
    let zeta = univariate_threshold(scenario, alpha, t_len);
    let dim = series.dim();
    let mut sparsity: f64 = 0.0;
    let mut affected = Vec::with_capacity(candidates.len());
    for (m, &b) in candidates.iter().enumerate() {
        let s = if m == 0 { 1 } else { candidates[m - 1] + 1 };
        let e = candidates.get(m + 1).copied().unwrap_or(t_len);
        let interval = Interval { s, e };
        let hits: Vec<usize> = match scenario.candidate_range(interval) {
            Some((lo, hi)) if (lo..=hi).contains(&b) => (1..=dim)
                .filter(|&j| {
                    component_contrast(series, interval, j, b, scenario).is_ok_and(|v| v > zeta)
                })
                .collect(),
            // segment too short for a slope contrast at b
            _ => Vec::new(),
        };
        sparsity = sparsity.max(hits.len() as f64 / dim as f64);
        affected.push(hits);
    }
    Ok(SparsityEstimate { sparsity, affected })
}

fn attach_affected(report: &mut ChangePointReport, estimate: &SparsityEstimate) {
    for (point, hits) in report.per_point.iter_mut().zip(&estimate.affected) {
        point.affected = hits.clone();
    }
}

/// Sparsity-adaptive detection: run with `LInf`, estimate the sparsity of
/// what it found, and rerun with `L2` when the changes look dense.
pub fn mid_opt(series: &MultiSeries, cfg: &DetectionConfig) -> Result<ChangePointReport> {
    let sp_alpha = cfg.sparsity_alpha.unwrap_or(cfg.alpha);
    let zeta_inf = default_threshold(series, cfg, Norm::LInf)?;
    let mut first = mid_detect(series, cfg, Norm::LInf, zeta_inf)?;
    if first.is_empty() {
        first.sparsity_estimate = Some(0.0);
        return Ok(first);
    }
    let estimate = estimate_sparsity(series, &first.changepoints, cfg.scenario, sp_alpha)?;
    if estimate.sparsity >= DENSE_CUTOFF {
        let zeta_2 = default_threshold(series, cfg, Norm::L2)?;
        let mut second = mid_detect(series, cfg, Norm::L2, zeta_2)?;
        if !second.is_empty() {
            let dense = estimate_sparsity(series, &second.changepoints, cfg.scenario, sp_alpha)?;
            attach_affected(&mut second, &dense);
        }
        second.sparsity_estimate = Some(estimate.sparsity);
        return Ok(second);
    }
    // sparse, or in the (0.4, 0.6) band where either norm does equally well
    attach_affected(&mut first, &estimate);
    first.sparsity_estimate = Some(estimate.sparsity);
    Ok(first)
}
