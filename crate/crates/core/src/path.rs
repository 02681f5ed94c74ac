//! Piecewise-constant trajectories of small integer vectors that change one
//! coordinate at a time, as produced by the East model and by the inner
//! chain `b * Y_t`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Change {
    pub time: f64,
    pub site: usize,
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SitePath {
    horizon: f64,
    initial: Vec<u32>,
    changes: Vec<Change>,
}

impl SitePath {
    pub fn new(initial: Vec<u32>, horizon: f64) -> Self {
        SitePath {
            horizon,
            initial,
            changes: Vec::new(),
        }
    }

    /// Appends a change point; times must be nondecreasing and within the horizon.
    pub(crate) fn push(&mut self, change: Change) {
        debug_assert!(change.time <= self.horizon);
        debug_assert!(self.changes.last().is_none_or(|c| c.time <= change.time));
        self.changes.push(change);
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn changes(&self) -> &[Change] {
        &self.changes
    }

    pub fn len(&self) -> usize {
        self.initial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }

    /// State at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> Vec<u32> {
        let mut state = self.initial.clone();
        for c in self.changes.iter().take_while(|c| c.time <= t) {
            state[c.site] = c.value;
        }
        state
    }

    pub fn final_state(&self) -> Vec<u32> {
        self.state_at(f64::INFINITY)
    }

    /// Calls `f(start, end, state)` for every maximal constant segment of
    /// `[0, horizon]`, skipping zero-length ones.
    pub fn for_each_segment(&self, mut f: impl FnMut(f64, f64, &[u32])) {
        let mut state = self.initial.clone();
        let mut start = 0.0;
        for c in &self.changes {
            if c.time > start {
                f(start, c.time, &state);
                start = c.time;
            }
            state[c.site] = c.value;
        }
        if self.horizon > start {
            f(start, self.horizon, &state);
        }
    }

    /// `(1/T) * integral_0^T 1{pred(state_t)} dt`, exact from change points.
    pub fn occupation_fraction(&self, pred: impl Fn(&[u32]) -> bool) -> Result<f64> {
        if self.horizon <= 0.0 {
            return Err(Error::invalid("horizon", "occupation needs a positive horizon"));
        }
        let mut total = 0.0;
        self.for_each_segment(|a, b, s| {
            if pred(s) {
                total += b - a;
            }
        });
        Ok(total / self.horizon)
    }

    /// `time<TAB>site<TAB>newvalue` lines, sites 1-based.
    pub fn change_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.changes {
            out.push_str(&format!("{}\t{}\t{}\n", c.time, c.site + 1, c.value));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_path() -> SitePath {
        let mut p = SitePath::new(vec![1, 0, 0], 4.0);
        p.push(Change { time: 1.0, site: 1, value: 1 });
        p.push(Change { time: 2.5, site: 2, value: 1 });
        p.push(Change { time: 3.0, site: 1, value: 0 });
        p
    }

    #[test]
    fn occupation_from_change_points() {
        let p = sample_path();
        assert_eq!(p.occupation_fraction(|s| s[1] == 1).unwrap(), 2.0 / 4.0);
        assert_eq!(p.occupation_fraction(|_| true).unwrap(), 1.0);
        assert_eq!(p.occupation_fraction(|s| s[2] == 1).unwrap(), 1.5 / 4.0);
        assert_eq!(p.state_at(2.9), vec![1, 1, 1]);
        assert_eq!(p.final_state(), vec![1, 0, 1]);
    }

    #[test]
    fn empty_horizon_is_an_error() {
        let p = SitePath::new(vec![1], 0.0);
        assert!(p.occupation_fraction(|_| true).is_err());
    }
}
