//! The panel data model: a `T x d` matrix of observations stored time-major.
//!
//! Every public index is 1-based. Time point `t` runs over `1..=T` and
//! component `j` over `1..=d`.

use serde::{Deserialize, Serialize};

use crate::error::{MidError, Result};

/// A validated multivariate sequence of `T >= 2` time points in `d >= 1`
/// components. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries {
    values: Vec<f64>,
    len: usize,
    dim: usize,
}

impl MultiSeries {
    /// Builds a series from row-major (time-major) storage.
    pub fn from_time_major(values: Vec<f64>, len: usize, dim: usize) -> Result<Self> {
        if len == 0 || dim == 0 {
            return Err(MidError::EmptyInput);
        }
        if values.len() != len * dim {
            return Err(MidError::DimensionMismatch {
                expected: len * dim,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(MidError::NonFiniteEntry {
                row: pos / dim + 1,
                col: pos % dim + 1,
            });
        }
        if len < 2 {
            return Err(MidError::TooShort { len, min: 2 });
        }
        Ok(Self { values, len, dim })
    }

    /// Builds a series from one vector per component.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let dim = columns.len();
        let len = columns.first().map_or(0, Vec::len);
        if dim == 0 || len == 0 {
            return Err(MidError::EmptyInput);
        }
        let mut values = Vec::with_capacity(len * dim);
        for t in 0..len {
            for (j, col) in columns.iter().enumerate() {
                if col.len() != len {
                    return Err(MidError::RaggedRow {
                        row: j + 1,
                        expected: len,
                        found: col.len(),
                    });
                }
                values.push(col[t]);
            }
        }
        Self::from_time_major(values, len, dim)
    }

    /// Number of time points `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: a valid series has at least two time points.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of components `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at time `t` and component `j`, both 1-based.
    ///
    /// Panics when either index is out of range.
    pub fn get(&self, t: usize, j: usize) -> f64 {
        assert!((1..=self.len).contains(&t) && (1..=self.dim).contains(&j));
        self.values[(t - 1) * self.dim + (j - 1)]
    }

    /// Observation vector at time `t` (1-based).
    pub fn row(&self, t: usize) -> &[f64] {
        assert!((1..=self.len).contains(&t));
        &self.values[(t - 1) * self.dim..t * self.dim]
    }

    /// Component `j` (1-based) as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!((1..=self.dim).contains(&j));
        self.values
            .iter()
            .skip(j - 1)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    /// Rows `s..=e` as a contiguous time-major slice.
    pub fn rows(&self, interval: Interval) -> &[f64] {
        &self.values[(interval.s - 1) * self.dim..interval.e * self.dim]
    }

    /// The whole panel in time-major order.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Applies `f(j, value)` to every entry, `j` being the 1-based component.
    pub(crate) fn map_entries(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let dim = self.dim;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % dim + 1, v))
            .collect();
        Self {
            values,
            len: self.len,
            dim,
        }
    }
}

/// Validates a row-per-time-point matrix and wraps it as a [`MultiSeries`].
pub fn validate_series(rows: &[Vec<f64>]) -> Result<MultiSeries> {
    let first = rows.first().ok_or(MidError::EmptyInput)?;
    let dim = first.len();
    if dim == 0 {
        return Err(MidError::EmptyInput);
    }
    let mut values = Vec::with_capacity(rows.len() * dim);
    for (t, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(MidError::RaggedRow {
                row: t + 1,
                expected: dim,
                found: row.len(),
            });
        }
        values.extend_from_slice(row);
    }
    MultiSeries::from_time_major(values, rows.len(), dim)
}

/// A closed index range `[s, e]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub s: usize,
    pub e: usize,
}

impl Interval {
    /// Checked constructor against a series of length `len`.
    pub fn new(s: usize, e: usize, len: usize) -> Result<Self> {
        if s == 0 || s > e || e > len {
            return Err(MidError::InvalidInterval { s, e, len });
        }
        Ok(Self { s, e })
    }

    /// Cardinality `e - s + 1`.
    pub fn len(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        self.s <= t && t <= self.e
    }
}

/// Which structural change the detector looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Changes in the mean of piecewise-constant signals.
    PiecewiseConstant,
    /// Changes in the slope of continuous piecewise-linear signals.
    PiecewiseLinear,
}

impl Scenario {
    /// Shortest interval with at least one candidate split.
    pub fn min_interval_len(self) -> usize {
        match self {
            Scenario::PiecewiseConstant => 2,
            Scenario::PiecewiseLinear => 3,
        }
    }

    /// First and last candidate of the interval, if any.
    pub fn candidate_range(self, interval: Interval) -> Option<(usize, usize)> {
        if interval.len() < self.min_interval_len() {
            return None;
        }
        match self {
            Scenario::PiecewiseConstant => Some((interval.s, interval.e - 1)),
            Scenario::PiecewiseLinear => Some((interval.s + 1, interval.e - 1)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::PiecewiseConstant => "mean",
            Scenario::PiecewiseLinear => "slope",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_well_formed_matrix() {
        let rows = vec![vec![1.0, 2.0]; 4];
        let series = validate_series(&rows).unwrap();
        assert_eq!((series.len(), series.dim()), (4, 2));
    }

    #[test]
    fn rejects_nan_with_location() {
        let mut rows = vec![vec![0.0, 0.0]; 4];
        rows[2][0] = f64::NAN;
        assert_eq!(
            validate_series(&rows),
            Err(MidError::NonFiniteEntry { row: 3, col: 1 })
        );
    }

    #[test]
    fn rejects_single_row() {
        let rows = vec![vec![1.0, 2.0, 3.0]];
        assert_eq!(
            validate_series(&rows),
            Err(MidError::TooShort { len: 1, min: 2 })
        );
    }

    #[test]
    fn rejects_ragged_rows() {
        let rows = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(
            validate_series(&rows),
            Err(MidError::RaggedRow { row: 2, .. })
        ));
    }

    #[test]
    fn columns_and_rows_agree() {
        let series =
            MultiSeries::from_columns(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(series.row(2), &[2.0, 5.0]);
        assert_eq!(series.column(2), vec![4.0, 5.0, 6.0]);
        assert_eq!(series.get(3, 1), 3.0);
    }

    #[test]
    fn interval_cardinality_exhaustive() {
        for len in 1..=20 {
            for s in 1..=len {
                for e in s..=len {
                    let iv = Interval::new(s, e, len).unwrap();
                    assert_eq!(iv.len(), e - s + 1);
                }
            }
        }
        assert!(Interval::new(0, 3, 5).is_err());
        assert!(Interval::new(4, 3, 5).is_err());
        assert!(Interval::new(1, 6, 5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn entries_round_trip(len in 2usize..20, dim in 1usize..6, seed in proptest::collection::vec(-1e6f64..1e6, 120)) {
            let rows: Vec<Vec<f64>> = (0..len)
                .map(|t| (0..dim).map(|j| seed[(t * dim + j) % seed.len()]).collect())
                .collect();
            let series = validate_series(&rows).unwrap();
            for t in 1..=len {
                for j in 1..=dim {
                    proptest::prop_assert_eq!(series.get(t, j), rows[t - 1][j - 1]);
                }
            }
        }
    }
}
