//! Multivariate isolate-detect: offline detection of multiple change-points
//! in the mean, or in the slope of a continuous piecewise-linear signal, of a
//! possibly high-dimensional panel.
//!
//! ```
//! use mid_core::{detect, DetectionConfig, MultiSeries, NormPolicy, Scenario};
//!
//! let a: Vec<f64> = (1..=100).map(|t| if t > 40 { 5.0 } else { 0.0 }).collect();
//! let b = vec![0.0; 100];
//! let series = MultiSeries::from_columns(&[a, b]).unwrap();
//! let cfg = DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::LInf);
//! assert_eq!(detect(&series, &cfg).unwrap().changepoints, vec![40]);
//! ```
#![forbid(unsafe_code)]

pub mod aggregate;
pub mod config;
pub mod contrast;
pub mod detect;
pub mod error;
pub mod eval;
pub mod preprocess;
pub mod report;
pub mod series;

pub use aggregate::{aggregate_matrix, aggregate_row, AggregatedScores};
pub use config::{
    Alpha, DetectionConfig, Norm, NormPolicy, DEFAULT_LAMBDA, DEFAULT_PERMUTATIONS,
    DEFAULT_PERMUTATION_ALPHA,
};
pub use contrast::{contrast_matrix, ContrastMatrix};
pub use detect::{
    calibrate_constants, detect, estimate_sparsity, interval_schedule, mid_detect, mid_opt,
    mid_perm, scan_interval, threshold, CalibrationSpec, Hit, ThresholdTable,
};
pub use error::{MidError, Result};
pub use preprocess::{anscombe, estimate_sigma_mad, normalize, SigmaVector};
pub use report::{ChangePointReport, DetectedPoint};
pub use series::{validate_series, Interval, MultiSeries, Scenario};

/// Derives an independent seed for a substream labelled by `parts`.
///
/// Each step is a splitmix64 round, so nearby labels give unrelated seeds.
pub fn stream_seed(seed: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}
