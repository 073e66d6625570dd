use serde::{Deserialize, Serialize};

use crate::error::{MidError, Result};
use crate::series::Scenario;

/// A mean-dominant norm used to aggregate contrasts across components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    /// `d^{-1/2}` times the Euclidean norm.
    #[serde(rename = "L2")]
    L2,
    /// The largest entry.
    #[serde(rename = "LInf")]
    LInf,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a detection run chooses its aggregation and acceptance rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormPolicy {
    L2,
    LInf,
    /// Run with `LInf`, estimate sparsity, rerun with `L2` for dense changes.
    Auto,
    /// `L2` aggregation with a permutation-based acceptance rule.
    PermL2,
    /// `LInf` aggregation with a permutation-based acceptance rule.
    PermLInf,
}

/// Type-I error level of the tabulated threshold constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alpha {
    #[serde(rename = "0.05")]
    Five,
    #[serde(rename = "0.10")]
    Ten,
}

impl Alpha {
    pub fn from_f64(alpha: f64) -> Result<Self> {
        if (alpha - 0.05).abs() < 1e-12 {
            Ok(Alpha::Five)
        } else if (alpha - 0.10).abs() < 1e-12 {
            Ok(Alpha::Ten)
        } else {
            Err(MidError::UnknownAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Alpha::Five => 0.05,
            Alpha::Ten => 0.10,
        }
    }
}

pub const DEFAULT_LAMBDA: usize = 10;
pub const DEFAULT_PERMUTATIONS: usize = 1000;
pub const DEFAULT_PERMUTATION_ALPHA: f64 = 0.01;

/// Everything a detection run needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub scenario: Scenario,
    pub norm: NormPolicy,
    pub alpha: Alpha,
    /// Expansion step of the right- and left-expanding interval grid.
    pub lambda: usize,
    /// Replaces the tabulated constant `C` in `C * sqrt(log(T d^{1/4}))`.
    pub threshold_constant_override: Option<f64>,
    pub permutation_count: usize,
    pub permutation_alpha: f64,
    pub rng_seed: Option<u64>,
    /// Level of the univariate constants used when estimating sparsity.
    /// `None` uses `alpha`.
    pub sparsity_alpha: Option<Alpha>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::PiecewiseConstant,
            norm: NormPolicy::Auto,
            alpha: Alpha::Five,
            lambda: DEFAULT_LAMBDA,
            threshold_constant_override: None,
            permutation_count: DEFAULT_PERMUTATIONS,
            permutation_alpha: DEFAULT_PERMUTATION_ALPHA,
            rng_seed: None,
            sparsity_alpha: None,
        }
    }
}

impl DetectionConfig {
    pub fn new(scenario: Scenario, norm: NormPolicy) -> Self {
        Self {
            scenario,
            norm,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(MidError::ZeroLambda);
        }
        if let Some(c) = self.threshold_constant_override {
            if !(c.is_finite() && c > 0.0) {
                return Err(MidError::InvalidConfig(format!(
                    "threshold constant must be positive, got {c}"
                )));
            }
        }
        if self.permutation_count == 0 {
            return Err(MidError::InvalidConfig(
                "permutation count must be at least 1".into(),
            ));
        }
        if !(self.permutation_alpha > 0.0 && self.permutation_alpha < 1.0) {
            return Err(MidError::InvalidConfig(format!(
                "permutation alpha must lie in (0, 1), got {}",
                self.permutation_alpha
            )));
        }
        Ok(())
    }
}
