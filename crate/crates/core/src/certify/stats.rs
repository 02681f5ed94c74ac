use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::beta::{beta_reg, inv_beta_reg};

use crate::error::{Error, Result};

/// Exact (Clopper-Pearson) binomial interval for a proportion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub samples: u64,
}

impl ConfidenceInterval {
    /// Two-sided interval for `successes` out of `samples`.
    pub fn clopper_pearson(successes: u64, samples: u64, confidence: f64) -> Result<Self> {
        check(successes, samples, confidence)?;
        let alpha = 1.0 - confidence;
        Ok(ConfidenceInterval {
            point: successes as f64 / samples as f64,
            lower: cp_lower(successes, samples, alpha / 2.0),
            upper: cp_upper(successes, samples, alpha / 2.0),
            confidence,
            samples,
        })
    }

    /// One-sided upper bound: `[0, upper]` holds with probability `confidence`.
    pub fn upper_one_sided(successes: u64, samples: u64, confidence: f64) -> Result<Self> {
        check(successes, samples, confidence)?;
        Ok(ConfidenceInterval {
            point: successes as f64 / samples as f64,
            lower: 0.0,
            upper: cp_upper(successes, samples, 1.0 - confidence),
            confidence,
            samples,
        })
    }

    /// One-sided lower bound: `[lower, 1]` holds with probability `confidence`.
    pub fn lower_one_sided(successes: u64, samples: u64, confidence: f64) -> Result<Self> {
        check(successes, samples, confidence)?;
        Ok(ConfidenceInterval {
            point: successes as f64 / samples as f64,
            lower: cp_lower(successes, samples, 1.0 - confidence),
            upper: 1.0,
            confidence,
            samples,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn check(successes: u64, samples: u64, confidence: f64) -> Result<()> {
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    if successes > samples {
        return Err(Error::invalid("successes", format!("{successes} > {samples}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid("confidence", format!("need 0 < c < 1, got {confidence}")));
    }
    Ok(())
}

/// Largest `p` with `P(Bin(n, p) >= k) <= tail`.
pub(crate) fn cp_lower(k: u64, n: u64, tail: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        inv_beta_reg(k as f64, (n - k + 1) as f64, tail)
    }
}

/// Smallest `p` with `P(Bin(n, p) <= k) <= tail`.
pub(crate) fn cp_upper(k: u64, n: u64, tail: f64) -> f64 {
    if k == n {
        1.0
    } else {
        inv_beta_reg((k + 1) as f64, (n - k) as f64, 1.0 - tail)
    }
}

/// Central exact binomial acceptance band: the smallest `lo` and largest
/// `hi` with `P(X < lo) <= (1-c)/2` and `P(X > hi) <= (1-c)/2`.
pub fn binomial_band(samples: u64, p: f64, confidence: f64) -> Result<(u64, u64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("{p} not a probability")));
    }
    check(0, samples.max(1), confidence)?;
    let tail = (1.0 - confidence) / 2.0;
    let dist = Binomial::new(p, samples).map_err(|e| Error::invalid("p", e.to_string()))?;
    // lo: first k with P(X <= k) > tail; hi: first k with P(X > k) <= tail.
    let search = |pred: &dyn Fn(u64) -> bool| {
        let (mut a, mut b) = (0u64, samples);
        while a < b {
            let mid = a + (b - a) / 2;
            if pred(mid) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        a
    };
    let lo = search(&|k| dist.cdf(k) > tail);
    let hi = search(&|k| dist.sf(k) <= tail);
    Ok((lo, hi))
}

/// Independent check of the incomplete-beta inversion by bisection.
pub fn beta_quantile_bisect(a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
