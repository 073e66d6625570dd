use serde::{Deserialize, Serialize};

use crate::error::{MidError, Result};
use crate::series::Interval;

/// Which end of the working segment an expanding interval is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `[s, c]`: grows to the right from the segment start.
    Right,
    /// `[c, e]`: grows to the left from the segment end.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandingInterval {
    pub interval: Interval,
    pub side: Side,
    /// 1-based expansion index `i` of `R_i` / `L_i`.
    pub step: usize,
}

/// Right- and left-expanding intervals over `[s, e]`, interleaved as
/// `R_1, L_1, R_2, L_2, ..., R_K, L_K` with `K = ceil((e - s + 1) / lambda)`.
pub fn interval_schedule(s: usize, e: usize, lambda: usize) -> Result<Vec<ExpandingInterval>> {
    if s >= e {
        return Err(MidError::EmptyRange { s, e });
    }
    if lambda == 0 {
        return Err(MidError::ZeroLambda);
    }
    let n = e - s + 1;
    let k = n.div_ceil(lambda);
    let mut out = Vec::with_capacity(2 * k);
    for i in 1..=k {
        let reach = (i * lambda).min(n);
        out.push(ExpandingInterval {
            interval: Interval {
                s,
                e: s + reach - 1,
            },
            side: Side::Right,
            step: i,
        });
        out.push(ExpandingInterval {
            interval: Interval {
                s: e + 1 - reach,
                e,
            },
            side: Side::Left,
            step: i,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: usize, e: usize) -> Interval {
        Interval { s, e }
    }

    #[test]
    fn full_range_schedule() {
        let sched = interval_schedule(1, 200, 10).unwrap();
        assert_eq!(sched.len(), 40);
        let firsts: Vec<Interval> = sched.iter().take(4).map(|x| x.interval).collect();
        assert_eq!(
            firsts,
            vec![iv(1, 10), iv(191, 200), iv(1, 20), iv(181, 200)]
        );
        assert_eq!(sched[38].interval, iv(1, 200));
        assert_eq!(sched[38].side, Side::Right);
        assert_eq!(sched[38].step, 20);
        // R_3 is the detection interval of the worked mean-change example
        assert_eq!(sched[4].interval, iv(1, 30));
        assert_eq!((sched[4].side, sched[4].step), (Side::Right, 3));
    }

    #[test]
    fn shifted_origin() {
        let sched = interval_schedule(30, 200, 10).unwrap();
        assert_eq!(sched[0].interval, iv(30, 39));
        assert_eq!(sched[1].interval, iv(191, 200));
        assert_eq!(sched.len(), 2 * 18);
        assert_eq!(sched[sched.len() - 2].interval, iv(30, 200));
        assert_eq!(sched[sched.len() - 1].interval, iv(30, 200));
    }

    #[test]
    fn large_step_covers_everything() {
        for lambda in [5, 6, 100] {
            let sched = interval_schedule(3, 7, lambda).unwrap();
            let ivs: Vec<Interval> = sched.iter().map(|x| x.interval).collect();
            assert_eq!(ivs, vec![iv(3, 7), iv(3, 7)]);
        }
    }

    #[test]
    fn rejects_empty_range() {
        assert_eq!(
            interval_schedule(5, 5, 10),
            Err(MidError::EmptyRange { s: 5, e: 5 })
        );
        assert_eq!(interval_schedule(1, 5, 0), Err(MidError::ZeroLambda));
    }

    #[test]
    fn intervals_stay_inside_and_grow() {
        for (s, e, lambda) in [(1, 37, 4), (10, 11, 1), (5, 99, 7)] {
            let sched = interval_schedule(s, e, lambda).unwrap();
            for w in sched.chunks(2) {
                assert_eq!(w[0].interval.s, s);
                assert_eq!(w[1].interval.e, e);
                assert_eq!(w[0].interval.len(), w[1].interval.len());
            }
            for pair in sched.windows(3) {
                assert!(pair[2].interval.len() >= pair[0].interval.len());
            }
        }
    }
}
