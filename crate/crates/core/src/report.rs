use serde::{Deserialize, Serialize};

use crate::config::Norm;
use crate::series::Interval;

/// One accepted change-point with the evidence that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedPoint {
    /// Estimated location `r`: the last time point before the change.
    pub location: usize,
    /// The expanding interval in which the detection fired.
    pub interval: Interval,
    /// Aggregated contrast at `location` within `interval`.
    pub value: f64,
    /// Component (1-based) with the largest contrast at `location`.
    pub component: usize,
    /// Components whose univariate contrast exceeds the univariate threshold.
    /// Filled only by the sparsity-adaptive run.
    pub affected: Vec<usize>,
}

/// Result of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointReport {
    /// Sorted, strictly increasing locations.
    pub changepoints: Vec<usize>,
    pub per_point: Vec<DetectedPoint>,
    pub norm_used: Norm,
    pub sparsity_estimate: Option<f64>,
    /// Threshold in effect, absent for the permutation variants.
    pub threshold: Option<f64>,
}

impl ChangePointReport {
    pub(crate) fn from_points(
        mut points: Vec<DetectedPoint>,
        norm_used: Norm,
        threshold: Option<f64>,
    ) -> Self {
        points.sort_by_key(|p| p.location);
        points.dedup_by_key(|p| p.location);
        Self {
            changepoints: points.iter().map(|p| p.location).collect(),
            per_point: points,
            norm_used,
            sparsity_estimate: None,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.changepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changepoints.is_empty()
    }
}
