//! Default threshold constants and the `C * sqrt(log(T d^{1/4}))` rule.
//!
//! The constants were tuned on pure-noise panels (T = 700 and 1400) so that
//! the share of runs with no detection matches `1 - alpha`. Dimensions above
//! 50 reuse the `d = 50` constant.

use crate::config::{Alpha, Norm};
use crate::error::{MidError, Result};
use crate::series::Scenario;

/// Largest tabulated dimension.
pub const MAX_TABULATED_DIM: usize = 50;

#[derive(Debug, Clone, Copy)]
struct Row {
    scenario: Scenario,
    norm: Norm,
    d_lo: usize,
    d_hi: usize,
    c05: f64,
    c10: f64,
}

const fn row(scenario: Scenario, norm: Norm, d_lo: usize, d_hi: usize, c05: f64, c10: f64) -> Row {
    Row {
        scenario,
        norm,
        d_lo,
        d_hi,
        c05,
        c10,
    }
}

use Norm::{LInf, L2};
use Scenario::{PiecewiseConstant as Mean, PiecewiseLinear as Slope};

#[rustfmt::skip]
const ROWS: &[Row] = &[
    row(Mean, L2, 1, 1, 1.7, 1.55),
    row(Mean, L2, 2, 2, 1.25, 1.25),
    row(Mean, L2, 3, 3, 1.1, 1.05),
    row(Mean, L2, 4, 4, 1.05, 0.95),
    row(Mean, L2, 5, 5, 0.95, 0.9),
    row(Mean, L2, 6, 6, 0.9, 0.9),
    row(Mean, L2, 7, 7, 0.9, 0.8),
    row(Mean, L2, 8, 8, 0.8, 0.8),
    row(Mean, L2, 9, 9, 0.8, 0.75),
    row(Mean, L2, 10, 13, 0.75, 0.75),
    row(Mean, L2, 14, 14, 0.75, 0.65),
    row(Mean, L2, 15, 20, 0.7, 0.65),
    row(Mean, L2, 21, 23, 0.65, 0.6),
    row(Mean, L2, 24, 39, 0.6, 0.6),
    row(Mean, L2, 40, 50, 0.6, 0.55),

    row(Mean, LInf, 1, 1, 1.7, 1.55),
    row(Mean, LInf, 2, 3, 1.75, 1.7),
    row(Mean, LInf, 4, 6, 1.8, 1.7),
    row(Mean, LInf, 7, 13, 1.85, 1.75),
    row(Mean, LInf, 14, 25, 1.9, 1.8),
    row(Mean, LInf, 26, 28, 1.9, 1.85),
    row(Mean, LInf, 29, 50, 1.95, 1.85),

    row(Slope, L2, 1, 1, 1.65, 1.55),
    row(Slope, L2, 2, 2, 1.25, 1.2),
    row(Slope, L2, 3, 3, 1.05, 1.05),
    row(Slope, L2, 4, 4, 0.95, 0.95),
    row(Slope, L2, 5, 5, 0.9, 0.9),
    row(Slope, L2, 6, 6, 0.9, 0.85),
    row(Slope, L2, 7, 7, 0.8, 0.8),
    row(Slope, L2, 8, 8, 0.8, 0.75),
    row(Slope, L2, 9, 11, 0.75, 0.75),
    row(Slope, L2, 12, 16, 0.7, 0.7),
    row(Slope, L2, 17, 19, 0.65, 0.6),
    // no separate d = 23 row; it shares the 20-22 constants
    row(Slope, L2, 20, 23, 0.6, 0.6),
    row(Slope, L2, 24, 42, 0.6, 0.55),
    row(Slope, L2, 43, 50, 0.55, 0.55),

    row(Slope, LInf, 1, 1, 1.65, 1.55),
    row(Slope, LInf, 2, 2, 1.7, 1.6),
    row(Slope, LInf, 3, 3, 1.75, 1.6),
    row(Slope, LInf, 4, 5, 1.75, 1.65),
    row(Slope, LInf, 6, 13, 1.75, 1.7),
    row(Slope, LInf, 14, 25, 1.8, 1.75),
    row(Slope, LInf, 26, 38, 1.85, 1.8),
    row(Slope, LInf, 39, 50, 1.9, 1.85),
];

/// One expanded entry of the constants table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEntry {
    pub scenario: Scenario,
    pub norm: Norm,
    pub alpha: Alpha,
    pub dim: usize,
    pub constant: f64,
}

impl ThresholdEntry {
    /// The audit line `<scenario> <norm> <alpha> <d> <C>`.
    pub fn audit_line(&self) -> String {
        format!(
            "{} {} {:.2} {} {}",
            self.scenario,
            self.norm,
            self.alpha.value(),
            self.dim,
            self.constant
        )
    }
}

/// Header of the audit format shared by the table dump and calibration output.
pub const AUDIT_HEADER: &str = "# scenario norm alpha d constant";

/// The embedded table of default constants.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThresholdTable;

impl ThresholdTable {
    /// Default constant for `(scenario, norm, alpha, d)`; `d > 50` maps to 50.
    pub fn constant(&self, scenario: Scenario, norm: Norm, alpha: Alpha, dim: usize) -> f64 {
        let d = dim.clamp(1, MAX_TABULATED_DIM);
        let row = ROWS
            .iter()
            .find(|r| r.scenario == scenario && r.norm == norm && (r.d_lo..=r.d_hi).contains(&d))
            .expect("threshold table covers every dimension 1..=50");
        match alpha {
            Alpha::Five => row.c05,
            Alpha::Ten => row.c10,
        }
    }

    /// Every `(scenario, norm, alpha, d)` cell for `d = 1..=50`.
    pub fn entries(&self) -> Vec<ThresholdEntry> {
        let mut out = Vec::new();
        for scenario in [Mean, Slope] {
            for norm in [L2, LInf] {
                for alpha in [Alpha::Five, Alpha::Ten] {
                    for dim in 1..=MAX_TABULATED_DIM {
                        out.push(ThresholdEntry {
                            scenario,
                            norm,
                            alpha,
                            dim,
                            constant: self.constant(scenario, norm, alpha, dim),
                        });
                    }
                }
            }
        }
        out
    }

    /// Plain-text dump in the audit format, one line per cell.
    pub fn dump(&self) -> String {
        let mut s = String::from(AUDIT_HEADER);
        s.push('\n');
        for e in self.entries() {
            s.push_str(&e.audit_line());
            s.push('\n');
        }
        s
    }
}

/// `sqrt(log(T * d^{1/4}))`.
pub fn threshold_rate(t_len: usize, dim: usize) -> f64 {
    ((t_len as f64).ln() + 0.25 * (dim as f64).ln()).sqrt()
}

/// Detection threshold `C * sqrt(log(T d^{1/4}))`.
pub fn threshold(
    scenario: Scenario,
    norm: Norm,
    alpha: Alpha,
    t_len: usize,
    dim: usize,
    override_constant: Option<f64>,
) -> Result<f64> {
    if t_len < 2 {
        return Err(MidError::TooShort { len: t_len, min: 2 });
    }
    if dim == 0 {
        return Err(MidError::EmptyInput);
    }
    let c =
        override_constant.unwrap_or_else(|| ThresholdTable.constant(scenario, norm, alpha, dim));
    Ok(c * threshold_rate(t_len, dim))
}

/// Same as [`threshold`] for an `alpha` given as a number.
pub fn threshold_for_alpha(
    scenario: Scenario,
    norm: Norm,
    alpha: f64,
    t_len: usize,
    dim: usize,
    override_constant: Option<f64>,
) -> Result<f64> {
    threshold(
        scenario,
        norm,
        Alpha::from_f64(alpha)?,
        t_len,
        dim,
        override_constant,
    )
}

/// Univariate threshold `C * sqrt(log T)` used when estimating sparsity,
/// with `C` taken from the `d = 1` row.
pub fn univariate_threshold(scenario: Scenario, alpha: Alpha, t_len: usize) -> f64 {
    ThresholdTable.constant(scenario, LInf, alpha, 1) * (t_len as f64).ln().sqrt()
}
