//! Signal generators, segmentation metrics and the simulation harness.

mod benchmark;
mod generate;
mod metrics;

pub use benchmark::{
    method_name, preset_mean, preset_slope, replicate_seed, run_benchmark, run_replicate,
    BenchmarkReport, BenchmarkSpec, BucketScheme, CellReport, CellSpec, ReplicateOutcome,
    SigmaPolicy, CSV_HEADER,
};
pub use generate::{equispaced_changepoints, generate_signal, GroundTruth, SignalSpec};
pub use metrics::{adjusted_rand_index, hausdorff_scaled};
