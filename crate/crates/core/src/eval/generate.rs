//! Synthetic panels with known change-points.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{MidError, Result};
use crate::series::{MultiSeries, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub t_len: usize,
    pub dim: usize,
    pub scenario: Scenario,
    /// Sorted change-point locations. A mean change at `r` separates `r` from
    /// `r + 1`; a slope change at `r` is a kink at `r`.
    pub changepoints: Vec<usize>,
    /// Share of components affected by each change, in `(0, 1]`.
    pub sparsity: f64,
    /// Bounds of the uniform draw for each jump or slope-change size.
    pub magnitude_range: (f64, f64),
    pub noise_sd: f64,
    pub seed: u64,
}

/// What the generator put into a panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub changepoints: Vec<usize>,
    /// Sorted 1-based components affected by each change-point.
    pub affected: Vec<Vec<usize>>,
}

/// `n` change-points spread evenly over `[1, T]`: `r_j = round(j T / (n + 1))`.
pub fn equispaced_changepoints(t_len: usize, n: usize) -> Vec<usize> {
    (1..=n)
        .map(|j| ((j * t_len) as f64 / (n + 1) as f64).round() as usize)
        .collect()
}

impl SignalSpec {
    /// Components touched by each change.
    pub fn affected_count(&self) -> usize {
        ((self.sparsity * self.dim as f64) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MidError::InvalidSpec(msg));
        if self.dim == 0 {
            return bad("dimension must be positive".into());
        }
        let lo = match self.scenario {
            Scenario::PiecewiseConstant => 1,
            Scenario::PiecewiseLinear => 2,
        };
        if self.t_len < lo + 1 {
            return bad(format!("length {} is too short", self.t_len));
        }
        for (i, &r) in self.changepoints.iter().enumerate() {
            if r < lo || r >= self.t_len {
                return bad(format!(
                    "change-point {r} outside [{lo}, {}]",
                    self.t_len - 1
                ));
            }
            if i > 0 && self.changepoints[i - 1] >= r {
                return bad("change-points must be strictly increasing".into());
            }
        }
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return bad(format!("sparsity {} outside (0, 1]", self.sparsity));
        }
        let (mlo, mhi) = self.magnitude_range;
        if !(mlo.is_finite() && mhi.is_finite() && 0.0 <= mlo && mlo <= mhi) {
            return bad(format!("magnitude range ({mlo}, {mhi}) is invalid"));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return bad(format!("noise sd {} is invalid", self.noise_sd));
        }
        Ok(())
    }
}

fn draw_magnitude(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Builds the panel described by `spec`.
///
/// Mean jumps carry a uniformly random sign. A slope change is signed to
/// move the component's slope towards zero (randomly when it is zero), which
/// keeps long piecewise-linear signals bounded.
pub fn generate_signal(spec: &SignalSpec) -> Result<(MultiSeries, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (t_len, dim) = (spec.t_len, spec.dim);
    let k = spec.affected_count();

    // per change: (component, signed size)
    let mut changes = Vec::with_capacity(spec.changepoints.len());
    let mut affected = Vec::with_capacity(spec.changepoints.len());
    let mut slope = vec![0.0; dim];
    for _ in &spec.changepoints {
        let mut comps = sample(&mut rng, dim, k).into_vec();
        comps.sort_unstable();
        let mut sized = Vec::with_capacity(k);
        for &j in &comps {
            let size = draw_magnitude(&mut rng, spec.magnitude_range);
            let up = match spec.scenario {
                Scenario::PiecewiseLinear if slope[j] != 0.0 => slope[j] < 0.0,
                _ => rng.random_bool(0.5),
            };
            let delta = if up { size } else { -size };
            if spec.scenario == Scenario::PiecewiseLinear {
                slope[j] += delta;
            }
            sized.push((j, delta));
        }
        affected.push(comps.iter().map(|j| j + 1).collect());
        changes.push(sized);
    }

    let mut values = vec![0.0; t_len * dim];
    match spec.scenario {
        Scenario::PiecewiseConstant => {
            for (&r, sized) in spec.changepoints.iter().zip(&changes) {
                for &(j, delta) in sized {
                    for t in r..t_len {
                        values[t * dim + j] += delta;
                    }
                }
            }
        }
        Scenario::PiecewiseLinear => {
            // f_t - f_{t-1} changes by delta from t = r + 1 on
            for (&r, sized) in spec.changepoints.iter().zip(&changes) {
                for &(j, delta) in sized {
                    for t in r..t_len {
                        values[t * dim + j] += delta * (t + 1 - r) as f64;
                    }
                }
            }
        }
    }
    if spec.noise_sd > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sd).expect("valid noise sd");
        for v in values.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }
    let series = MultiSeries::from_time_major(values, t_len, dim)?;
    Ok((
        series,
        GroundTruth {
            changepoints: spec.changepoints.clone(),
            affected,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scenario: Scenario, changepoints: Vec<usize>, sparsity: f64, dim: usize) -> SignalSpec {
        SignalSpec {
            t_len: 300,
            dim,
            scenario,
            changepoints,
            sparsity,
            magnitude_range: (1.0, 2.0),
            noise_sd: 0.0,
            seed: 5,
        }
    }

    /// Locations and components where the differenced signal is non-zero.
    fn recovered(series: &MultiSeries, scenario: Scenario) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for j in 1..=series.dim() {
            let x = series.column(j);
            let hits: Vec<usize> = match scenario {
                Scenario::PiecewiseConstant => (1..x.len())
                    .filter(|&r| (x[r] - x[r - 1]).abs() > 1e-9)
                    .collect(),
                // centred at 0-based r - 1, i.e. time point r
                Scenario::PiecewiseLinear => (2..x.len())
                    .filter(|&r| (x[r] - 2.0 * x[r - 1] + x[r - 2]).abs() > 1e-9)
                    .collect(),
            };
            for r in hits {
                match out.iter_mut().find(|(loc, _)| *loc == r) {
                    Some((_, comps)) => comps.push(j),
                    None => out.push((r, vec![j])),
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn equispaced_locations() {
        assert_eq!(equispaced_changepoints(1500, 3), vec![375, 750, 1125]);
        assert_eq!(equispaced_changepoints(10, 1), vec![5]);
        assert!(equispaced_changepoints(1500, 50)
            .windows(2)
            .all(|w| w[1] - w[0] >= 29));
    }

    #[test]
    fn single_dense_change_hits_every_component() {
        for scenario in [Scenario::PiecewiseConstant, Scenario::PiecewiseLinear] {
            let (series, truth) = generate_signal(&spec(scenario, vec![120], 1.0, 4)).unwrap();
            assert_eq!(truth.affected, vec![vec![1, 2, 3, 4]]);
            assert_eq!(recovered(&series, scenario), vec![(120, vec![1, 2, 3, 4])]);
        }
    }

    #[test]
    fn half_sparsity_affects_half() {
        let (_, truth) = generate_signal(&spec(
            Scenario::PiecewiseConstant,
            vec![50, 150, 250],
            0.5,
            30,
        ))
        .unwrap();
        assert!(truth.affected.iter().all(|a| a.len() == 15));
    }

    #[test]
    fn same_seed_same_panel() {
        let mut s = spec(Scenario::PiecewiseLinear, vec![100, 200], 0.2, 10);
        s.noise_sd = 1.0;
        assert_eq!(generate_signal(&s).unwrap(), generate_signal(&s).unwrap());
        let mut other = s.clone();
        other.seed += 1;
        assert_ne!(
            generate_signal(&s).unwrap().0,
            generate_signal(&other).unwrap().0
        );
    }

    #[test]
    fn slopes_stay_bounded() {
        let mut s = spec(
            Scenario::PiecewiseLinear,
            equispaced_changepoints(1500, 50),
            0.8,
            5,
        );
        s.t_len = 1500;
        let (series, _) = generate_signal(&s).unwrap();
        for j in 1..=5 {
            let x = series.column(j);
            assert!(x.windows(2).all(|w| (w[1] - w[0]).abs() <= 2.0 + 1e-9));
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let ok = spec(Scenario::PiecewiseConstant, vec![10], 0.5, 2);
        let mut s = ok.clone();
        s.changepoints = vec![300];
        assert!(generate_signal(&s).is_err());
        s = ok.clone();
        s.changepoints = vec![20, 10];
        assert!(generate_signal(&s).is_err());
        s = ok.clone();
        s.sparsity = 0.0;
        assert!(generate_signal(&s).is_err());
        s = ok.clone();
        s.magnitude_range = (2.0, 1.0);
        assert!(generate_signal(&s).is_err());
        s = spec(Scenario::PiecewiseLinear, vec![1], 0.5, 2);
        assert!(generate_signal(&s).is_err());
    }

    proptest::proptest! {
        #[test]
        fn noiseless_panels_are_honest(
            seed in 0u64..10_000,
            n in 1usize..6,
            dim in 1usize..8,
            sp in 0.05f64..=1.0,
            linear in proptest::bool::ANY,
        ) {
            let scenario = if linear { Scenario::PiecewiseLinear } else { Scenario::PiecewiseConstant };
            let mut s = spec(scenario, equispaced_changepoints(200, n), sp, dim);
            s.t_len = 200;
            s.seed = seed;
            let (series, truth) = generate_signal(&s).unwrap();
            let expected: Vec<(usize, Vec<usize>)> = truth
                .changepoints
                .iter()
                .copied()
                .zip(truth.affected.iter().cloned())
                .collect();
            proptest::prop_assert_eq!(recovered(&series, scenario), expected);
        }
    }
}
