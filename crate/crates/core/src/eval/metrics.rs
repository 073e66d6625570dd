//! Agreement between estimated and true segmentations.

use crate::error::{MidError, Result};

fn pairs(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

/// Segment lengths of `{1..T}` cut after each point of `cps`.
fn segment_lengths(cps: &[usize], t_len: usize) -> Vec<usize> {
    let mut bounds = Vec::with_capacity(cps.len() + 2);
    bounds.push(0);
    bounds.extend_from_slice(cps);
    bounds.push(t_len);
    bounds.windows(2).map(|w| w[1] - w[0]).collect()
}

fn checked(cps: &[usize], t_len: usize) -> Vec<usize> {
    let mut v = cps.to_vec();
    v.sort_unstable();
    v.dedup();
    assert!(
        v.iter().all(|&r| r >= 1 && r < t_len),
        "change-points must lie in [1, {}]",
        t_len.saturating_sub(1)
    );
    v
}

/// Hubert-Arabie adjusted Rand index of the segmentations of `{1..T}`
/// induced by two change-point sets.
///
/// # Panics
/// If a change-point lies outside `[1, T - 1]`.
pub fn adjusted_rand_index(true_cps: &[usize], est_cps: &[usize], t_len: usize) -> f64 {
    let a = checked(true_cps, t_len);
    let b = checked(est_cps, t_len);

    // contingency cells are the overlaps of the two segment families
    let mut cuts: Vec<usize> = a.iter().chain(&b).copied().collect();
    cuts.sort_unstable();
    cuts.dedup();
    let index: f64 = segment_lengths(&cuts, t_len).into_iter().map(pairs).sum();
    let sum_a: f64 = segment_lengths(&a, t_len).into_iter().map(pairs).sum();
    let sum_b: f64 = segment_lengths(&b, t_len).into_iter().map(pairs).sum();

    let expected = sum_a * sum_b / pairs(t_len);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        // both partitions trivial in the same way
        return if a == b { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

/// Two-sided Hausdorff distance between the sets, divided by the longest
/// segment of the true segmentation. An empty estimate counts every point as
/// `T` away.
pub fn hausdorff_scaled(true_cps: &[usize], est_cps: &[usize], t_len: usize) -> Result<f64> {
    if true_cps.is_empty() {
        return Err(MidError::EmptyTruth);
    }
    let truth = checked(true_cps, t_len);
    let est = checked(est_cps, t_len);
    let n_s = *segment_lengths(&truth, t_len)
        .iter()
        .max()
        .expect("non-empty") as f64;

    let directed = |from: &[usize], to: &[usize]| -> usize {
        from.iter()
            .map(|&x| to.iter().map(|&y| x.abs_diff(y)).min().unwrap_or(t_len))
            .max()
            .unwrap_or(0)
    };
    let dist = directed(&truth, &est).max(directed(&est, &truth));
    Ok(dist as f64 / n_s)
}
