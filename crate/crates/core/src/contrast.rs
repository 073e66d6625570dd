//! Per-component contrast statistics.
//!
//! For mean changes the contrast is the absolute CUSUM statistic; for slope
//! changes it is the absolute inner product with a unit vector that is
//! orthogonal to constants and linear trends and peaks at a kink.
//!
//! The single-value functions evaluate the closed-form expressions directly
//! and are the reference for the interval-wide kernel used by the detector,
//! which works on locally detrended prefix sums instead.

use crate::error::{MidError, Result};
use crate::series::{Interval, MultiSeries, Scenario};

/// Signed CUSUM of `x` (the values on `[s, e]`) split after `b`.
pub fn cusum_value(x: &[f64], s: usize, e: usize, b: usize) -> Result<f64> {
    if b < s || b >= e {
        return Err(MidError::InvalidSplit { s, e, b });
    }
    let n = e - s + 1;
    if x.len() != n {
        return Err(MidError::LengthMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let m = b - s + 1;
    let (left, right) = x.split_at(m);
    let nf = n as f64;
    let mf = m as f64;
    let rf = (e - b) as f64;
    let lsum: f64 = left.iter().sum();
    let rsum: f64 = right.iter().sum();
    Ok((rf / (nf * mf)).sqrt() * lsum - (mf / (nf * rf)).sqrt() * rsum)
}

fn check_slope_split(s: usize, e: usize, b: usize) -> Result<()> {
    if b < s + 1 || b + 1 > e {
        return Err(MidError::InvalidSplit { s, e, b });
    }
    Ok(())
}

/// The kink contrast vector on `[s, e]` for a slope change at `b`.
///
/// Entry `i` corresponds to time `s + i`.
pub fn slope_contrast_phi(s: usize, e: usize, b: usize) -> Result<Vec<f64>> {
    check_slope_split(s, e, b)?;
    let (sf, ef, bf) = (s as f64, e as f64, b as f64);
    let n = ef - sf + 1.0;
    let alpha = (6.0
        / (n * (n * n - 1.0) * (1.0 + (ef - bf + 1.0) * (bf - sf + 1.0) + (ef - bf) * (bf - sf))))
        .sqrt();
    let beta = (((ef - bf + 1.0) * (ef - bf)) / ((bf - sf + 1.0) * (bf - sf))).sqrt();
    Ok((s..=e)
        .map(|t| {
            let t = t as f64;
            if t <= bf {
                alpha
                    * beta
                    * ((ef + 2.0 * bf - 3.0 * sf + 2.0) * t
                        - (bf * ef + bf * sf - 2.0 * sf * sf + 2.0 * sf))
            } else {
                alpha / beta
                    * ((2.0 * ef * ef + 2.0 * ef - bf * ef - bf * sf)
                        - (3.0 * ef - 2.0 * bf - sf + 2.0) * t)
            }
        })
        .collect())
}

/// `|<x, phi>|` for the values `x` on `[s, e]`.
pub fn slope_contrast_value(x: &[f64], s: usize, e: usize, b: usize) -> Result<f64> {
    let phi = slope_contrast_phi(s, e, b)?;
    if x.len() != phi.len() {
        return Err(MidError::LengthMismatch {
            expected: phi.len(),
            found: x.len(),
        });
    }
    Ok(x.iter().zip(&phi).map(|(a, p)| a * p).sum::<f64>().abs())
}

/// Absolute contrast of component `j` (1-based) at `b` within `interval`,
/// evaluated with the direct formulas.
pub fn component_contrast(
    series: &MultiSeries,
    interval: Interval,
    j: usize,
    b: usize,
    scenario: Scenario,
) -> Result<f64> {
    let x: Vec<f64> = (interval.s..=interval.e)
        .map(|t| series.get(t, j))
        .collect();
    match scenario {
        Scenario::PiecewiseConstant => Ok(cusum_value(&x, interval.s, interval.e, b)?.abs()),
        Scenario::PiecewiseLinear => slope_contrast_value(&x, interval.s, interval.e, b),
    }
}

/// Absolute contrasts of every candidate in an interval for every component.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastMatrix {
    values: Vec<f64>,
    interval: Interval,
    first_candidate: usize,
    rows: usize,
    dim: usize,
    scenario: Scenario,
}

impl ContrastMatrix {
    /// Wraps precomputed contrasts for `interval`, one row per candidate in
    /// the scenario's candidate range.
    pub fn from_values(
        values: Vec<f64>,
        dim: usize,
        interval: Interval,
        scenario: Scenario,
    ) -> Result<Self> {
        let (first, last) =
            scenario
                .candidate_range(interval)
                .ok_or(MidError::IntervalTooShort {
                    len: interval.len(),
                    min: scenario.min_interval_len(),
                })?;
        let rows = last - first + 1;
        if dim == 0 || values.len() != rows * dim {
            return Err(MidError::DimensionMismatch {
                expected: rows * dim,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v < 0.0)
        {
            return Err(MidError::NegativeEntry { index, value });
        }
        Ok(Self {
            values,
            interval,
            first_candidate: first,
            rows,
            dim,
            scenario,
        })
    }

    /// Number of candidates `J`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Absolute candidate locations, in row order.
    pub fn candidates(&self) -> impl Iterator<Item = usize> + '_ {
        self.first_candidate..self.first_candidate + self.rows
    }

    /// Candidate location of row `i` (0-based row).
    pub fn candidate(&self, i: usize) -> usize {
        self.first_candidate + i
    }

    /// Contrasts of row `i` (0-based) across components.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Entry for row `i` (0-based) and component `j` (1-based).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + (j - 1)]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }
}

/// Builds the `J x d` matrix of absolute contrasts on `interval`.
pub fn contrast_matrix(
    series: &MultiSeries,
    interval: Interval,
    scenario: Scenario,
) -> Result<ContrastMatrix> {
    let interval = Interval::new(interval.s, interval.e, series.len())?;
    let min = scenario.min_interval_len();
    let (first, last) = scenario
        .candidate_range(interval)
        .ok_or(MidError::IntervalTooShort {
            len: interval.len(),
            min,
        })?;
    let mut values = Vec::new();
    let mut scratch = Vec::new();
    block_contrasts(
        series.rows(interval),
        interval.len(),
        series.dim(),
        scenario,
        &mut scratch,
        &mut values,
    );
    Ok(ContrastMatrix {
        values,
        interval,
        first_candidate: first,
        rows: last - first + 1,
        dim: series.dim(),
        scenario,
    })
}

/// Fills `out` with the `J x d` absolute contrasts of a time-major block of
/// `n` rows. `scratch` is reused between calls.
pub(crate) fn block_contrasts(
    block: &[f64],
    n: usize,
    dim: usize,
    scenario: Scenario,
    scratch: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    debug_assert_eq!(block.len(), n * dim);
    out.clear();
    match scenario {
        Scenario::PiecewiseConstant => cusum_block(block, n, dim, scratch, out),
        Scenario::PiecewiseLinear => slope_block(block, n, dim, scratch, out),
    }
}

fn cusum_block(block: &[f64], n: usize, dim: usize, scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
    if n < 2 {
        return;
    }
    // scratch: [mean | running centred sum]
    scratch.clear();
    scratch.resize(2 * dim, 0.0);
    let (mean, run) = scratch.split_at_mut(dim);
    for row in block.chunks_exact(dim) {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    let nf = n as f64;
    for m in mean.iter_mut() {
        *m /= nf;
    }
    out.reserve((n - 1) * dim);
    for (i, row) in block.chunks_exact(dim).take(n - 1).enumerate() {
        let m = (i + 1) as f64;
        let w = (nf / (m * (nf - m))).sqrt();
        for ((r, &x), &mu) in run.iter_mut().zip(row).zip(mean.iter()) {
            *r += x - mu;
            out.push((*r * w).abs());
        }
    }
}

fn slope_block(block: &[f64], n: usize, dim: usize, scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
    if n < 3 {
        return;
    }
    let nf = n as f64;
    let ubar = (nf + 1.0) / 2.0;
    let suu = nf * (nf * nf - 1.0) / 12.0;
    // scratch: [mean | slope | p0 | p1 | p0 total | p1 total]
    scratch.clear();
    scratch.resize(6 * dim, 0.0);
    let (mean, rest) = scratch.split_at_mut(dim);
    let (slope, rest) = rest.split_at_mut(dim);
    let (p0, rest) = rest.split_at_mut(dim);
    let (p1, rest) = rest.split_at_mut(dim);
    let (p0n, p1n) = rest.split_at_mut(dim);

    for row in block.chunks_exact(dim) {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= nf;
    }
    for (i, row) in block.chunks_exact(dim).enumerate() {
        let du = (i + 1) as f64 - ubar;
        for ((sl, &x), &mu) in slope.iter_mut().zip(row).zip(mean.iter()) {
            *sl += du * (x - mu);
        }
    }
    for sl in slope.iter_mut() {
        *sl /= suu;
    }
    let resid = |u: f64, x: f64, mu: f64, sl: f64| x - mu - sl * (u - ubar);
    for (i, row) in block.chunks_exact(dim).enumerate() {
        let u = (i + 1) as f64;
        for j in 0..dim {
            let r = resid(u, row[j], mean[j], slope[j]);
            p0n[j] += r;
            p1n[j] += u * r;
        }
    }

    out.reserve((n - 2) * dim);
    // Local coordinates: s = 1, e = n, split at k in 2..=n-1.
    let mut rows = block.chunks_exact(dim);
    let first = rows.next().unwrap_or(&[]);
    for j in 0..dim {
        let r = resid(1.0, first[j], mean[j], slope[j]);
        p0[j] = r;
        p1[j] = r;
    }
    for (i, row) in rows.take(n - 2).enumerate() {
        let k = (i + 2) as f64;
        for j in 0..dim {
            let r = resid(k, row[j], mean[j], slope[j]);
            p0[j] += r;
            p1[j] += k * r;
        }
        let alpha = (6.0
            / (nf * (nf * nf - 1.0) * (1.0 + (nf - k + 1.0) * k + (nf - k) * (k - 1.0))))
            .sqrt();
        let beta = (((nf - k + 1.0) * (nf - k)) / (k * (k - 1.0))).sqrt();
        let l1 = alpha * beta * (nf + 2.0 * k - 1.0);
        let l0 = -alpha * beta * k * (nf + 1.0);
        let r0 = alpha / beta * (nf + 1.0) * (2.0 * nf - k);
        let r1 = -alpha / beta * (3.0 * nf - 2.0 * k + 1.0);
        for j in 0..dim {
            let v = l1 * p1[j] + l0 * p0[j] + r0 * (p0n[j] - p0[j]) + r1 * (p1n[j] - p1[j]);
            out.push(v.abs());
        }
    }
}
