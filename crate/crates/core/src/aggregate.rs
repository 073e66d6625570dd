//! Mean-dominant norms that collapse a row of per-component contrasts into a
//! single score per candidate.

use crate::config::Norm;
use crate::contrast::ContrastMatrix;
use crate::error::{MidError, Result};

/// Aggregates a nonnegative vector with `norm`.
pub fn aggregate_row(y: &[f64], norm: Norm) -> Result<f64> {
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(MidError::NegativeEntry { index, value });
    }
    Ok(aggregate_unchecked(y, norm))
}

#[inline]
pub(crate) fn aggregate_unchecked(y: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::L2 => (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt(),
        Norm::LInf => y.iter().copied().fold(0.0, f64::max),
    }
}

/// One aggregated score per candidate of a [`ContrastMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedScores {
    pub scores: Vec<f64>,
    pub candidates: Vec<usize>,
    pub norm: Norm,
}

impl AggregatedScores {
    /// Index (into `scores`) of the largest score, smallest index on ties.
    pub fn argmax(&self) -> Option<usize> {
        argmax_first(&self.scores)
    }
}

pub fn aggregate_matrix(matrix: &ContrastMatrix, norm: Norm) -> AggregatedScores {
    AggregatedScores {
        scores: matrix
            .row_iter()
            .map(|row| aggregate_unchecked(row, norm))
            .collect(),
        candidates: matrix.candidates().collect(),
        norm,
    }
}

/// Position of the maximum; ties go to the earliest position.
pub(crate) fn argmax_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contrast::contrast_matrix;
    use crate::series::{Interval, MultiSeries, Scenario};
    use proptest::prelude::*;

    #[test]
    fn row_examples() {
        let l2 = aggregate_row(&[3.0, 4.0], Norm::L2).unwrap();
        assert!((l2 - 5.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((l2 - 3.535534).abs() < 1e-6);
        assert_eq!(aggregate_row(&[3.0, 4.0], Norm::LInf).unwrap(), 4.0);
        for norm in [Norm::L2, Norm::LInf] {
            let v = aggregate_row(&[2.5; 7], norm).unwrap();
            assert!((v - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_negative_entries() {
        assert!(matches!(
            aggregate_row(&[1.0, -0.5], Norm::L2),
            Err(MidError::NegativeEntry { index: 1, .. })
        ));
        assert!(aggregate_row(&[f64::NAN], Norm::LInf).is_err());
    }

    #[test]
    fn matrix_examples() {
        let m = ContrastMatrix::from_values(
            vec![3.0, 4.0, 0.0, 1.0],
            2,
            Interval { s: 1, e: 3 },
            Scenario::PiecewiseConstant,
        )
        .unwrap();
        let l2 = aggregate_matrix(&m, Norm::L2);
        assert!((l2.scores[0] - 3.535534).abs() < 1e-6);
        assert!((l2.scores[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(l2.candidates, vec![1, 2]);

        let zero = MultiSeries::from_columns(&[vec![0.0; 6], vec![0.0; 6]]).unwrap();
        let m = contrast_matrix(
            &zero,
            Interval::new(1, 6, 6).unwrap(),
            Scenario::PiecewiseConstant,
        )
        .unwrap();
        let agg = aggregate_matrix(&m, Norm::L2);
        assert!(agg.scores.iter().all(|&s| s == 0.0));
        assert_eq!(agg.candidates, vec![1, 2, 3, 4, 5]);

        let single = MultiSeries::from_columns(&[vec![0.0, 1.0, 3.0, 3.0, 2.0]]).unwrap();
        let m = contrast_matrix(
            &single,
            Interval::new(1, 5, 5).unwrap(),
            Scenario::PiecewiseConstant,
        )
        .unwrap();
        for norm in [Norm::L2, Norm::LInf] {
            let agg = aggregate_matrix(&m, norm);
            for (i, s) in agg.scores.iter().enumerate() {
                assert!((s - m.get(i, 1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax_first(&[]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn mean_dominant_and_ordered(y in proptest::collection::vec(0.0f64..1e3, 1..200)) {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let l2 = aggregate_row(&y, Norm::L2).unwrap();
            let linf = aggregate_row(&y, Norm::LInf).unwrap();
            prop_assert!(l2 >= mean * (1.0 - 1e-12));
            prop_assert!(linf >= mean * (1.0 - 1e-12));
            prop_assert!(l2 <= linf * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_homogeneous(
            y in proptest::collection::vec(0.0f64..1e3, 1..50),
            gamma in 1e-3f64..1e3,
        ) {
            let mut rev = y.clone();
            rev.reverse();
            rev.rotate_left(y.len() / 3);
            for norm in [Norm::L2, Norm::LInf] {
                let a = aggregate_row(&y, norm).unwrap();
                let b = aggregate_row(&rev, norm).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
                let scaled: Vec<f64> = y.iter().map(|v| v * gamma).collect();
                let c = aggregate_row(&scaled, norm).unwrap();
                prop_assert!((c - gamma * a).abs() <= 1e-12 * c.max(f64::MIN_POSITIVE) + 1e-300);
            }
        }
    }
}
