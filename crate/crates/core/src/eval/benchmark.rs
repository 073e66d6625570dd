//! Replication engine for simulation tables.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DetectionConfig, NormPolicy};
use crate::detect::detect;
use crate::error::{MidError, Result};
use crate::preprocess::{mad_scales, normalize, SigmaVector};
use crate::series::{MultiSeries, Scenario};
use crate::stream_seed;

use super::generate::{equispaced_changepoints, generate_signal, GroundTruth, SignalSpec};
use super::metrics::{adjusted_rand_index, hausdorff_scaled};

/// One row of a simulation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub scenario: Scenario,
    pub t_len: usize,
    pub dim: usize,
    pub n_changes: usize,
    pub sparsity: f64,
    pub magnitude_range: (f64, f64),
    pub noise_sd: f64,
}

impl CellSpec {
    /// Unit-variance noise and `U(1, 2)` change sizes.
    pub fn standard(
        scenario: Scenario,
        t_len: usize,
        dim: usize,
        n_changes: usize,
        sparsity: f64,
    ) -> Self {
        Self {
            scenario,
            t_len,
            dim,
            n_changes,
            sparsity,
            magnitude_range: (1.0, 2.0),
            noise_sd: 1.0,
        }
    }

    pub fn signal(&self, seed: u64) -> SignalSpec {
        SignalSpec {
            t_len: self.t_len,
            dim: self.dim,
            scenario: self.scenario,
            changepoints: equispaced_changepoints(self.t_len, self.n_changes),
            sparsity: self.sparsity,
            magnitude_range: self.magnitude_range,
            noise_sd: self.noise_sd,
            seed,
        }
    }

    /// The panel and truth of the replicate seeded by `rep_seed`.
    pub fn replicate_panel(&self, rep_seed: u64) -> Result<(MultiSeries, GroundTruth)> {
        generate_signal(&self.signal(stream_seed(rep_seed, &[0])))
    }

    pub fn buckets(&self) -> BucketScheme {
        match (self.scenario, self.n_changes) {
            (Scenario::PiecewiseConstant, 20) => BucketScheme::Twenty,
            (Scenario::PiecewiseConstant, 50) => BucketScheme::Fifty,
            _ => BucketScheme::Narrow,
        }
    }
}

/// Grouping of `N_hat - N` used in a table's frequency columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BucketScheme {
    /// `<=-2, -1, 0, 1, 2, >=3`
    Narrow,
    /// `<=-10, (-10,-2), [-2,2], (2,10], >10`
    Twenty,
    /// `<=-40, (-40,-20), [-20,-10), [-10,10], >10`
    Fifty,
}

impl BucketScheme {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            BucketScheme::Narrow => &["<=-2", "-1", "0", "1", "2", ">=3"],
            BucketScheme::Twenty => &["<=-10", "(-10,-2)", "[-2,2]", "(2,10]", ">10"],
            BucketScheme::Fifty => &["<=-40", "(-40,-20)", "[-20,-10)", "[-10,10]", ">10"],
        }
    }

    pub fn bucket(self, diff: i64) -> usize {
        match self {
            BucketScheme::Narrow => (diff.clamp(-2, 3) + 2) as usize,
            BucketScheme::Twenty => match diff {
                ..=-10 => 0,
                -9..=-3 => 1,
                -2..=2 => 2,
                3..=10 => 3,
                _ => 4,
            },
            BucketScheme::Fifty => match diff {
                ..=-40 => 0,
                -39..=-21 => 1,
                -20..=-11 => 2,
                -10..=10 => 3,
                _ => 4,
            },
        }
    }
}

/// How each simulated panel is scaled before detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaPolicy {
    /// Use the panel as generated (noise sd known to be one).
    Known,
    /// Divide each component by its MAD estimate; a zero estimate becomes one.
    Mad,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub cells: Vec<CellSpec>,
    /// Detector template; `scenario` is taken from each cell and `rng_seed`
    /// from the replicate.
    pub detector: DetectionConfig,
    pub sigma: SigmaPolicy,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    /// `N_hat - N`.
    pub diff: i64,
    pub ari: f64,
    pub hausdorff: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: CellSpec,
    pub outcomes: Vec<ReplicateOutcome>,
    pub scheme: BucketScheme,
    /// Counts per label of `scheme`.
    pub frequencies: Vec<usize>,
    pub mean_ari: f64,
    pub mean_hausdorff: f64,
    pub mean_seconds: f64,
}

impl CellReport {
    fn new(cell: CellSpec, outcomes: Vec<ReplicateOutcome>) -> Self {
        let scheme = cell.buckets();
        let mut frequencies = vec![0; scheme.labels().len()];
        for o in &outcomes {
            frequencies[scheme.bucket(o.diff)] += 1;
        }
        let n = outcomes.len() as f64;
        let mean = |f: fn(&ReplicateOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / n;
        Self {
            mean_ari: mean(|o| o.ari),
            mean_hausdorff: mean(|o| o.hausdorff),
            mean_seconds: mean(|o| o.seconds),
            cell,
            scheme,
            frequencies,
            outcomes,
        }
    }

    /// Share of replicates with `|N_hat - N| <= tol`.
    pub fn fraction_within(&self, tol: i64) -> f64 {
        let hits = self.outcomes.iter().filter(|o| o.diff.abs() <= tol).count();
        hits as f64 / self.outcomes.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub method: String,
    pub cells: Vec<CellReport>,
}

pub fn method_name(policy: NormPolicy) -> &'static str {
    match policy {
        NormPolicy::L2 => "mid-l2",
        NormPolicy::LInf => "mid-linf",
        NormPolicy::Auto => "mid-opt",
        NormPolicy::PermL2 => "mid-perm-l2",
        NormPolicy::PermLInf => "mid-perm-linf",
    }
}

pub const CSV_HEADER: &str = "scenario,method,T,d,N,sp,reps,distribution,exact,ari,hausdorff";

impl BenchmarkReport {
    /// One line per cell. Timings are left out unless asked for, so that
    /// seeded runs produce identical files.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push_str(if with_timing { ",seconds\n" } else { "\n" });
        for c in &self.cells {
            let dist: Vec<String> = c
                .scheme
                .labels()
                .iter()
                .zip(&c.frequencies)
                .map(|(l, n)| format!("{l}={n}"))
                .collect();
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.4},{:.4}",
                c.cell.scenario,
                self.method,
                c.cell.t_len,
                c.cell.dim,
                c.cell.n_changes,
                c.cell.sparsity,
                c.outcomes.len(),
                dist.join(";"),
                c.fraction_within(0),
                c.mean_ari,
                c.mean_hausdorff,
            );
            if with_timing {
                let _ = write!(out, ",{:.4}", c.mean_seconds);
            }
            out.push('\n');
        }
        out
    }

    /// Plain-text table, one row per cell.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut last: Option<(Scenario, usize, BucketScheme)> = None;
        for c in &self.cells {
            let key = (c.cell.scenario, c.cell.n_changes, c.scheme);
            if last != Some(key) {
                if last.is_some() {
                    out.push('\n');
                }
                let _ = writeln!(
                    out,
                    "{} changes, scenario {}, T = {}",
                    c.cell.n_changes, c.cell.scenario, c.cell.t_len
                );
                let _ = write!(out, "{:<14} {:>4} {:>4}", "method", "sp", "d");
                for l in c.scheme.labels() {
                    let _ = write!(out, " {:>9}", l);
                }
                let _ = writeln!(out, " {:>6} {:>6} {:>9}", "ARI", "d_H", "time(s)");
                last = Some(key);
            }
            let _ = write!(
                out,
                "{:<14} {:>4} {:>4}",
                self.method, c.cell.sparsity, c.cell.dim
            );
            for n in &c.frequencies {
                let _ = write!(out, " {:>9}", n);
            }
            let _ = writeln!(
                out,
                " {:>6.3} {:>6.3} {:>9.3}",
                c.mean_ari, c.mean_hausdorff, c.mean_seconds
            );
        }
        out
    }
}

fn prepare(series: MultiSeries, scenario: Scenario, sigma: SigmaPolicy) -> Result<MultiSeries> {
    match sigma {
        SigmaPolicy::Known => Ok(series),
        SigmaPolicy::Mad => {
            let raw = mad_scales(&series, scenario)?;
            let safe = raw
                .into_iter()
                .map(|s| if s > 0.0 { s } else { 1.0 })
                .collect();
            normalize(&series, &SigmaVector::new(safe)?)
        }
    }
}

/// Runs one replicate of `cell` and scores it.
pub fn run_replicate(
    cell: &CellSpec,
    detector: &DetectionConfig,
    sigma: SigmaPolicy,
    seed: u64,
) -> Result<ReplicateOutcome> {
    let (series, truth) = cell.replicate_panel(seed)?;
    let cfg = DetectionConfig {
        scenario: cell.scenario,
        rng_seed: Some(stream_seed(seed, &[1])),
        ..detector.clone()
    };
    let start = Instant::now();
    let series = prepare(series, cell.scenario, sigma)?;
    let report = detect(&series, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let est = &report.changepoints;
    let ari = adjusted_rand_index(&truth.changepoints, est, cell.t_len);
    let hausdorff = if truth.changepoints.is_empty() {
        // no true segmentation to scale by; report the raw count of spurious points
        est.len() as f64
    } else {
        hausdorff_scaled(&truth.changepoints, est, cell.t_len)?
    };
    Ok(ReplicateOutcome {
        diff: est.len() as i64 - truth.changepoints.len() as i64,
        ari,
        hausdorff,
        seconds,
    })
}

/// Seed of replicate `rep` of cell `cell` in a run seeded by `seed`.
pub fn replicate_seed(seed: u64, cell: usize, rep: usize) -> u64 {
    stream_seed(seed, &[cell as u64, rep as u64])
}

/// Generates, detects and scores `reps` panels per cell. Replicate `r` of
/// cell `c` uses [`replicate_seed`]`(seed, c, r)`, so results do not depend on
/// scheduling.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    if spec.reps == 0 {
        return Err(MidError::InvalidConfig("reps must be at least 1".into()));
    }
    if spec.cells.is_empty() {
        return Err(MidError::InvalidConfig("benchmark grid is empty".into()));
    }
    for cell in &spec.cells {
        cell.signal(0).validate()?;
    }
    let mut cells = Vec::with_capacity(spec.cells.len());
    for (c, cell) in spec.cells.iter().enumerate() {
        let outcomes = (0..spec.reps)
            .into_par_iter()
            .map(|r| {
                run_replicate(
                    cell,
                    &spec.detector,
                    spec.sigma,
                    replicate_seed(spec.seed, c, r),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(CellReport::new(cell.clone(), outcomes));
    }
    Ok(BenchmarkReport {
        method: method_name(spec.detector.norm).to_string(),
        cells,
    })
}

/// The 18 mean-change settings: `N` in {3, 20, 50}, `d` in {30, 100},
/// `sp` in {0.2, 0.5, 0.8}, `T = 1500`.
pub fn preset_mean() -> Vec<CellSpec> {
    grid(Scenario::PiecewiseConstant, &[30, 100])
}

/// The 27 slope-change settings: as [`preset_mean`] with `d` in {10, 30, 100}.
pub fn preset_slope() -> Vec<CellSpec> {
    grid(Scenario::PiecewiseLinear, &[10, 30, 100])
}

fn grid(scenario: Scenario, dims: &[usize]) -> Vec<CellSpec> {
    let mut out = Vec::new();
    for n in [3, 20, 50] {
        for &d in dims {
            for sp in [0.2, 0.5, 0.8] {
                out.push(CellSpec::standard(scenario, 1500, d, n, sp));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_edges() {
        let s = BucketScheme::Narrow;
        let got: Vec<usize> = [-5, -2, -1, 0, 1, 2, 3, 9]
            .iter()
            .map(|&d| s.bucket(d))
            .collect();
        assert_eq!(got, vec![0, 0, 1, 2, 3, 4, 5, 5]);
        let t = BucketScheme::Twenty;
        let got: Vec<usize> = [-10, -9, -3, -2, 2, 3, 10, 11]
            .iter()
            .map(|&d| t.bucket(d))
            .collect();
        assert_eq!(got, vec![0, 1, 1, 2, 2, 3, 3, 4]);
        let f = BucketScheme::Fifty;
        let got: Vec<usize> = [-40, -39, -21, -20, -11, -10, 10, 11]
            .iter()
            .map(|&d| f.bucket(d))
            .collect();
        assert_eq!(got, vec![0, 1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn preset_sizes() {
        assert_eq!(preset_mean().len(), 18);
        assert_eq!(preset_slope().len(), 27);
    }

    #[test]
    fn noiseless_single_rep_is_exact() {
        let mut cell = CellSpec::standard(Scenario::PiecewiseConstant, 300, 5, 3, 0.6);
        cell.noise_sd = 0.0;
        cell.magnitude_range = (3.0, 4.0);
        let spec = BenchmarkSpec {
            cells: vec![cell],
            detector: DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::Auto),
            sigma: SigmaPolicy::Known,
            reps: 1,
            seed: 4,
        };
        let report = run_benchmark(&spec).unwrap();
        let c = &report.cells[0];
        assert_eq!(c.frequencies, vec![0, 0, 1, 0, 0, 0]);
        assert_eq!(c.mean_ari, 1.0);
        assert_eq!(c.mean_hausdorff, 0.0);
    }

    #[test]
    fn frequencies_sum_to_reps_and_csv_is_stable() {
        let spec = BenchmarkSpec {
            cells: vec![
                CellSpec::standard(Scenario::PiecewiseConstant, 200, 4, 2, 0.5),
                CellSpec::standard(Scenario::PiecewiseLinear, 200, 4, 2, 0.5),
            ],
            detector: DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::Auto),
            sigma: SigmaPolicy::Mad,
            reps: 6,
            seed: 9,
        };
        let a = run_benchmark(&spec).unwrap();
        for c in &a.cells {
            assert_eq!(c.frequencies.iter().sum::<usize>(), 6);
        }
        let b = run_benchmark(&spec).unwrap();
        assert_eq!(a.to_csv(false), b.to_csv(false));
        assert_eq!(a.to_csv(false).lines().count(), 3);
        assert!(a.to_table().contains("mid-opt"));
    }

    #[test]
    fn zero_reps_rejected() {
        let spec = BenchmarkSpec {
            cells: preset_mean(),
            detector: DetectionConfig::default(),
            sigma: SigmaPolicy::Known,
            reps: 0,
            seed: 0,
        };
        assert!(run_benchmark(&spec).is_err());
    }
}
