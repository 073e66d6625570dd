//! Permutation-based acceptance rule.
//!
//! Instead of a tabulated threshold, an interval's best aggregated contrast is
//! compared with the empirical `1 - alpha` quantile of the same statistic over
//! `K` random reorderings of the interval's rows. Rows move whole, so the
//! cross-component alignment of each time point is preserved.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{DetectionConfig, Norm, NormPolicy};
use crate::error::{MidError, Result};
use crate::report::ChangePointReport;
use crate::series::{Interval, MultiSeries, Scenario};
use crate::stream_seed;

use super::{check_length, run_worklist, Hit, Scanner};

/// Rank (1-based) of the order statistic used as the `1 - alpha` quantile.
pub(crate) fn quantile_rank(count: usize, alpha: f64) -> usize {
    // the offset absorbs representation error, e.g. 0.99 * 1000
    let rank = ((1.0 - alpha) * count as f64 - 1e-9).ceil() as usize;
    rank.clamp(1, count)
}

/// Best candidate of `interval`, kept only when it beats the permutation
/// quantile. Replicate `k` draws from a stream seeded by `(seed, s, e, k)`,
/// so the outcome does not depend on thread scheduling.
pub fn permutation_scan(
    series: &MultiSeries,
    interval: Interval,
    scenario: Scenario,
    norm: Norm,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> Option<Hit> {
    if permutations == 0 || interval.s == 0 || interval.e > series.len() {
        return None;
    }
    let hit = Scanner::default().best_hit(series, interval, scenario, norm)?;
    let n = interval.len();
    let dim = series.dim();
    let block = series.rows(interval);

    let mut maxima: Vec<f64> = (0..permutations)
        .into_par_iter()
        .map_init(
            || {
                (
                    Scanner::default(),
                    vec![0.0; n * dim],
                    (0..n).collect::<Vec<usize>>(),
                )
            },
            |(scanner, buf, order), k| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
                    seed,
                    &[interval.s as u64, interval.e as u64, k as u64],
                ));
                for (i, o) in order.iter_mut().enumerate() {
                    *o = i;
                }
                order.shuffle(&mut rng);
                for (dst, &src) in buf.chunks_exact_mut(dim).zip(order.iter()) {
                    dst.copy_from_slice(&block[src * dim..(src + 1) * dim]);
                }
                scanner
                    .best(buf, n, dim, scenario, norm)
                    .map_or(0.0, |(_, v)| v)
            },
        )
        .collect();
    maxima.sort_by(f64::total_cmp);
    let quantile = maxima[quantile_rank(permutations, alpha) - 1];
    (hit.value > quantile).then_some(hit)
}

/// Isolate-detect with the permutation acceptance rule.
pub fn mid_perm(series: &MultiSeries, cfg: &DetectionConfig) -> Result<ChangePointReport> {
    let norm = match cfg.norm {
        NormPolicy::PermL2 => Norm::L2,
        NormPolicy::PermLInf => Norm::LInf,
        other => {
            return Err(MidError::InvalidConfig(format!(
                "permutation detection needs a permutation norm, got {other:?}"
            )))
        }
    };
    cfg.validate()?;
    check_length(series, cfg.scenario)?;
    let seed = cfg.rng_seed.unwrap_or_else(rand::random);
    let points = run_worklist(series, cfg.scenario, cfg.lambda, |iv| {
        permutation_scan(
            series,
            iv,
            cfg.scenario,
            norm,
            cfg.permutation_count,
            cfg.permutation_alpha,
            seed,
        )
    })?;
    Ok(ChangePointReport::from_points(points, norm, None))
}
