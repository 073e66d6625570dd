//! Noise-scale estimation and variance-stabilising transforms.

use crate::error::{MidError, Result};
use crate::series::{MultiSeries, Scenario};

/// Gaussian consistency factor of the median absolute deviation.
pub const MAD_CONSISTENCY: f64 = 1.4826;

/// Per-component noise scales, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaVector(Vec<f64>);

impl SigmaVector {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if let Some(j) = sigma.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(MidError::DegenerateComponent(j + 1));
        }
        Ok(Self(sigma))
    }

    pub fn ones(dim: usize) -> Self {
        Self(vec![1.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median absolute deviation about the median (unscaled).
pub fn mad(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let med = median(&mut v);
    for x in v.iter_mut() {
        *x = (*x - med).abs();
    }
    median(&mut v)
}

/// Raw per-component estimates; components with zero MAD yield `0.0`.
pub fn mad_scales(series: &MultiSeries, scenario: Scenario) -> Result<Vec<f64>> {
    let min = scenario.min_interval_len() + 1;
    if series.len() < min {
        return Err(MidError::TooShort {
            len: series.len(),
            min,
        });
    }
    Ok((1..=series.dim())
        .map(|j| {
            let x = series.column(j);
            match scenario {
                Scenario::PiecewiseConstant => {
                    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
                    MAD_CONSISTENCY * mad(&diffs) / 2f64.sqrt()
                }
                Scenario::PiecewiseLinear => {
                    let diffs: Vec<f64> = x.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
                    MAD_CONSISTENCY * mad(&diffs) / 6f64.sqrt()
                }
            }
        })
        .collect())
}

/// Robust noise scale of each component from its differenced series: first
/// differences for mean changes, second differences for slope changes.
pub fn estimate_sigma_mad(series: &MultiSeries, scenario: Scenario) -> Result<SigmaVector> {
    SigmaVector::new(mad_scales(series, scenario)?)
}

/// Divides component `j` by `sigma[j]`.
pub fn normalize(series: &MultiSeries, sigma: &SigmaVector) -> Result<MultiSeries> {
    if sigma.len() != series.dim() {
        return Err(MidError::DimensionMismatch {
            expected: series.dim(),
            found: sigma.len(),
        });
    }
    let s = sigma.as_slice();
    Ok(series.map_entries(|j, v| v / s[j - 1]))
}

/// `a(x) = 2 sqrt(x + 3/8)` applied to a panel of counts.
pub fn anscombe(series: &MultiSeries) -> Result<MultiSeries> {
    for t in 1..=series.len() {
        for (j, &v) in series.row(t).iter().enumerate() {
            if v < 0.0 {
                return Err(MidError::NegativeCount { row: t, col: j + 1 });
            }
            if v.fract() != 0.0 {
                return Err(MidError::NonIntegerCount { row: t, col: j + 1 });
            }
        }
    }
    Ok(series.map_entries(|_, v| 2.0 * (v + 0.375).sqrt()))
}
