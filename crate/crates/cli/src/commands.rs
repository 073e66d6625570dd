use std::path::Path;

use serde::{Deserialize, Serialize};

use mid_core::detect::{calibrate_constants, CalibrationSpec, ThresholdTable, AUDIT_HEADER};
use mid_core::eval::{
    preset_mean, preset_slope, replicate_seed, run_benchmark, BenchmarkSpec, CellSpec, SigmaPolicy,
};
use mid_core::preprocess::mad_scales;
use mid_core::{
    anscombe, detect, normalize, Alpha, ChangePointReport, DetectedPoint, DetectionConfig,
    MidError, MultiSeries, Norm, NormPolicy, Scenario, SigmaVector,
};

use crate::args::{
    BenchSigmaArg, CalibrateArgs, DetectArgs, FormatArg, NormArg, PlainNormArg, PresetArg,
    ScenarioArg, SigmaArg, SimulateArgs,
};
use crate::io::{emit, panel_csv, read_panel_path, read_sigma_file};
use crate::CliError;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Errors raised by the data rather than by the flags.
fn core_err(e: MidError) -> CliError {
    match e {
        MidError::UnknownAlpha(_)
        | MidError::ZeroLambda
        | MidError::InvalidConfig(_)
        | MidError::InvalidSpec(_) => CliError::Config(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn scenario(arg: ScenarioArg) -> Scenario {
    match arg {
        ScenarioArg::Mean => Scenario::PiecewiseConstant,
        ScenarioArg::Slope => Scenario::PiecewiseLinear,
    }
}

fn policy(arg: NormArg) -> NormPolicy {
    match arg {
        NormArg::L2 => NormPolicy::L2,
        NormArg::Linf => NormPolicy::LInf,
        NormArg::Auto => NormPolicy::Auto,
        NormArg::PermL2 => NormPolicy::PermL2,
        NormArg::PermLinf => NormPolicy::PermLInf,
    }
}

fn policy_name(arg: NormArg) -> &'static str {
    match arg {
        NormArg::L2 => "l2",
        NormArg::Linf => "linf",
        NormArg::Auto => "auto",
        NormArg::PermL2 => "perm-l2",
        NormArg::PermLinf => "perm-linf",
    }
}

fn alpha(value: f64) -> Result<Alpha, CliError> {
    Alpha::from_f64(value)
        .map_err(|_| config_err(format!("--alpha must be 0.05 or 0.10, got {value}")))
}

/// Settings echoed back in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub scenario: String,
    pub norm: String,
    pub alpha: f64,
    pub lambda: usize,
    pub sigma: String,
    /// Scales each component was divided by.
    pub sigma_used: Vec<f64>,
    pub anscombe: bool,
    pub seed: Option<u64>,
    pub threshold_constant: Option<f64>,
    pub permutations: usize,
    pub perm_alpha: f64,
    pub sparsity_alpha: Option<f64>,
}

/// The JSON document written by `detect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub changepoints: Vec<usize>,
    pub per_point: Vec<DetectedPoint>,
    pub norm_used: Norm,
    pub sparsity_estimate: Option<f64>,
    pub threshold: Option<f64>,
    pub config_echo: ConfigEcho,
}

impl JsonReport {
    pub fn new(report: ChangePointReport, config_echo: ConfigEcho) -> Self {
        Self {
            changepoints: report.changepoints,
            per_point: report.per_point,
            norm_used: report.norm_used,
            sparsity_estimate: report.sparsity_estimate,
            threshold: report.threshold,
            config_echo,
        }
    }
}

fn detection_config(a: &DetectArgs) -> Result<DetectionConfig, CliError> {
    let cfg = DetectionConfig {
        scenario: scenario(a.scenario),
        norm: policy(a.norm),
        alpha: alpha(a.alpha)?,
        lambda: a.lambda,
        threshold_constant_override: a.threshold_constant,
        permutation_count: a.permutations,
        permutation_alpha: a.perm_alpha,
        rng_seed: a.seed,
        sparsity_alpha: a.sparsity_alpha.map(alpha).transpose()?,
    };
    cfg.validate().map_err(|e| config_err(e.to_string()))?;
    match (a.sigma, &a.sigma_file) {
        (SigmaArg::File, None) => return Err(config_err("--sigma file needs --sigma-file")),
        (SigmaArg::Mad | SigmaArg::None, Some(_)) => {
            return Err(config_err("--sigma-file is only used with --sigma file"))
        }
        _ => {}
    }
    Ok(cfg)
}

fn sigma_for(
    a: &DetectArgs,
    series: &MultiSeries,
    scenario: Scenario,
) -> Result<SigmaVector, CliError> {
    match a.sigma {
        SigmaArg::None => Ok(SigmaVector::ones(series.dim())),
        SigmaArg::Mad => {
            let raw = mad_scales(series, scenario).map_err(core_err)?;
            let mut safe = Vec::with_capacity(raw.len());
            for (j, s) in raw.into_iter().enumerate() {
                if s > 0.0 {
                    safe.push(s);
                } else {
                    eprintln!("warning: component {} has zero MAD; using scale 1", j + 1);
                    safe.push(1.0);
                }
            }
            SigmaVector::new(safe).map_err(core_err)
        }
        SigmaArg::File => {
            let path = a.sigma_file.as_deref().expect("checked with the flags");
            let values = read_sigma_file(path)?;
            if values.len() != series.dim() {
                return Err(CliError::Input(format!(
                    "{} holds {} scales but the panel has {} components",
                    path.display(),
                    values.len(),
                    series.dim()
                )));
            }
            SigmaVector::new(values)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
    }
}

fn report_csv(report: &ChangePointReport) -> String {
    let mut out = String::from("location,interval_start,interval_end,value,component,affected\n");
    for p in &report.per_point {
        let affected: Vec<String> = p.affected.iter().map(|j| j.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.location,
            p.interval.s,
            p.interval.e,
            p.value,
            p.component,
            affected.join(";")
        ));
    }
    out
}

pub fn cmd_detect(a: &DetectArgs) -> Result<(), CliError> {
    if a.dump_thresholds {
        return emit(a.output.as_deref(), &ThresholdTable.dump());
    }
    let cfg = detection_config(a)?;
    let input = a.input.as_deref().expect("required by the parser");
    let mut series = read_panel_path(input)?;
    if a.anscombe {
        series =
            anscombe(&series).map_err(|e| config_err(format!("--anscombe needs counts: {e}")))?;
    }
    let sigma = sigma_for(a, &series, cfg.scenario)?;
    let series = normalize(&series, &sigma).map_err(core_err)?;
    let report = detect(&series, &cfg).map_err(core_err)?;

    let text = match a.format {
        FormatArg::Csv => report_csv(&report),
        FormatArg::Json => {
            let echo = ConfigEcho {
                input: input.display().to_string(),
                scenario: cfg.scenario.to_string(),
                norm: policy_name(a.norm).to_string(),
                alpha: cfg.alpha.value(),
                lambda: cfg.lambda,
                sigma: format!("{:?}", a.sigma).to_lowercase(),
                sigma_used: sigma.as_slice().to_vec(),
                anscombe: a.anscombe,
                seed: a.seed,
                threshold_constant: a.threshold_constant,
                permutations: cfg.permutation_count,
                perm_alpha: cfg.permutation_alpha,
                sparsity_alpha: cfg.sparsity_alpha.map(Alpha::value),
            };
            let mut s = serde_json::to_string_pretty(&JsonReport::new(report, echo))
                .map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    emit(a.output.as_deref(), &text)
}

fn simulation_cells(a: &SimulateArgs) -> Result<Vec<CellSpec>, CliError> {
    let cells = match a.preset {
        Some(PresetArg::PaperS1) => preset_mean(),
        Some(PresetArg::PaperS2) => preset_slope(),
        None => {
            if a.dims.is_empty() || a.changes.is_empty() || a.sparsity.is_empty() {
                return Err(config_err(
                    "the grid needs at least one of each of --dims, --changes, --sparsity",
                ));
            }
            let mut cells = Vec::new();
            for &n in &a.changes {
                for &d in &a.dims {
                    for &sp in &a.sparsity {
                        cells.push(CellSpec {
                            scenario: scenario(a.scenario),
                            t_len: a.length,
                            dim: d,
                            n_changes: n,
                            sparsity: sp,
                            magnitude_range: (a.magnitude[0], a.magnitude[1]),
                            noise_sd: a.noise_sd,
                        });
                    }
                }
            }
            cells
        }
    };
    for cell in &cells {
        cell.signal(0)
            .validate()
            .map_err(|e| config_err(format!("invalid grid: {e}")))?;
    }
    Ok(cells)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    if a.reps == 0 {
        return Err(config_err("--reps must be at least 1"));
    }
    let cells = simulation_cells(a)?;
    let detector = DetectionConfig {
        norm: policy(a.method),
        alpha: alpha(a.alpha)?,
        lambda: a.lambda,
        permutation_count: a.permutations,
        permutation_alpha: a.perm_alpha,
        ..DetectionConfig::default()
    };
    detector.validate().map_err(|e| config_err(e.to_string()))?;
    if let Some(path) = &a.panel_out {
        let (panel, _) = cells[0]
            .replicate_panel(replicate_seed(a.seed, 0, 0))
            .map_err(core_err)?;
        emit(Some(path), &panel_csv(&panel))?;
    }
    let spec = BenchmarkSpec {
        cells,
        detector,
        sigma: match a.sigma {
            BenchSigmaArg::Known => SigmaPolicy::Known,
            BenchSigmaArg::Mad => SigmaPolicy::Mad,
        },
        reps: a.reps,
        seed: a.seed,
    };
    let report = run_benchmark(&spec).map_err(core_err)?;
    let csv = report.to_csv(a.timing);
    if a.table {
        if let Some(path) = &a.output {
            emit(Some(path), &csv)?;
        }
        emit(None, &report.to_table())
    } else {
        emit(a.output.as_deref(), &csv)
    }
}

/// `1,2,5` or `1-50`.
fn parse_dims(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || config_err(format!("--dims: cannot read `{text}`"));
    let dims: Vec<usize> = if let Some((lo, hi)) = text.split_once('-') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if dims.is_empty() || dims.contains(&0) {
        return Err(config_err("--dims must be positive"));
    }
    Ok(dims)
}

/// `start:stop:step`, values rounded to 10 decimals.
fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || config_err(format!("--grid: expected start:stop:step, got `{text}`"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start > 0.0 && step > 0.0 && stop >= start && stop.is_finite()) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(config_err("--grid has too many points"));
    }
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * 1e10).round() / 1e10)
        .collect())
}

pub fn cmd_calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    let spec = CalibrationSpec {
        scenario: scenario(a.scenario),
        norm: match a.norm {
            PlainNormArg::L2 => Norm::L2,
            PlainNormArg::Linf => Norm::LInf,
        },
        alpha: alpha(a.alpha)?,
        t_values: a.lengths.clone(),
        dims: parse_dims(&a.dims)?,
        reps: a.reps,
        grid: parse_grid(&a.grid)?,
        seed: a.seed,
        lambda: a.lambda,
    };
    let constants = calibrate_constants(&spec).map_err(|e| config_err(e.to_string()))?;
    let mut out = String::from(AUDIT_HEADER);
    out.push('\n');
    for c in &constants {
        out.push_str(&c.entry(&spec).audit_line());
        out.push('\n');
        eprintln!(
            "d = {}: C = {} leaves {}/{} null panels without detections",
            c.dim, c.constant, c.no_detection, c.panels
        );
    }
    emit(a.output.as_deref().map(Path::new), &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_grids() {
        assert_eq!(parse_dims("1-4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_dims("2, 7").unwrap(), vec![2, 7]);
        assert!(parse_dims("0").is_err());
        assert!(parse_dims("a").is_err());
        let g = parse_grid("1.5:1.8:0.1").unwrap();
        assert_eq!(g, vec![1.5, 1.6, 1.7, 1.8]);
        assert_eq!(parse_grid("0.05:3:0.01").unwrap().len(), 296);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:2:0").is_err());
    }
}
