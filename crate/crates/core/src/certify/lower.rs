use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};

use super::stats::ConfidenceInterval;
use crate::error::{Error, Result};
use crate::gfq::Modulus;
use crate::rng::{stream_rng, LOWER_STREAM};
use crate::walk::EventLog;

/// Joint confidence of the threshold family unless stated otherwise.
pub const LOWER_CONFIDENCE: f64 = 0.99;

/// Number of zeros above the diagonal in the last column of `X_T`.
/// Row operations act on that column as `c_i += a c_{i+1}`.
pub fn last_column_zeros(log: &EventLog) -> usize {
    let n = log.n();
    let m = log.modulus();
    let mut col = vec![0u32; n];
    col[n - 1] = 1;
    for e in log.events() {
        col[e.clock] = m.axpy(col[e.clock], e.scalar, col[e.clock + 1]);
    }
    col[..n - 1].iter().filter(|&&c| c == 0).count()
}

/// `P_pi(stat >= r)` for `r = 0..n-1`, where the statistic is
/// `Binomial(n - 1, 1/q)` under the uniform law.
pub fn stationary_zero_tail(n: usize, q: u32) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
    }
    let dist = Binomial::new(1.0 / q as f64, (n - 1) as u64).map_err(|e| Error::invalid("q", e.to_string()))?;
    Ok((0..n as u64)
        .map(|r| if r == 0 { 1.0 } else { dist.sf(r - 1) })
        .collect())
}

/// Lower confidence bound on `d_n` from observed statistics.
///
/// For each threshold `r` the event `{stat >= r}` gives
/// `d >= |P_T(stat >= r) - P_pi(stat >= r)|`; the returned `lower` is the
/// largest such gap certified by simultaneous Clopper-Pearson intervals
/// (Bonferroni over the `n` thresholds), floored at 0. `point` is the plug-in
/// maximum and `upper` the largest gap compatible with the intervals.
pub fn lower_bound_from_stats(stats: &[usize], n: usize, q: u32, confidence: f64) -> Result<ConfidenceInterval> {
    Modulus::new(q)?;
    let tail = stationary_zero_tail(n, q)?;
    let samples = stats.len() as u64;
    let per_threshold = 1.0 - (1.0 - confidence) / n as f64;
    let mut counts = vec![0u64; n];
    for &s in stats {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, limit: n });
        }
        counts[s] += 1;
    }
    let (mut point, mut lower, mut upper) = (0.0f64, 0.0f64, 0.0f64);
    let mut at_least = samples;
    for r in 0..n {
        let ci = ConfidenceInterval::clopper_pearson(at_least, samples, per_threshold)?;
        let pi_r = tail[r];
        point = point.max((ci.point - pi_r).abs());
        lower = lower.max(ci.lower - pi_r).max(pi_r - ci.upper);
        upper = upper.max(ci.upper - pi_r).max(pi_r - ci.lower);
        at_least -= counts[r];
    }
    Ok(ConfidenceInterval {
        point,
        lower: lower.max(0.0),
        upper: upper.min(1.0),
        confidence,
        samples,
    })
}

/// Distinguishing-statistic lower bound on `d_n(T)` at the default confidence.
pub fn tv_lower_statistic(n: usize, q: u32, horizon: f64, samples: u64, seed: u64) -> Result<ConfidenceInterval> {
    tv_lower_statistic_with(n, q, horizon, samples, seed, LOWER_CONFIDENCE)
}

pub fn tv_lower_statistic_with(
    n: usize,
    q: u32,
    horizon: f64,
    samples: u64,
    seed: u64,
    confidence: f64,
) -> Result<ConfidenceInterval> {
    let modulus = Modulus::new(q)?;
    let sample = |j: u64| {
        let mut rng = stream_rng(seed, LOWER_STREAM, j);
        EventLog::sample_from(&mut rng, n, modulus, horizon).map(|log| last_column_zeros(&log))
    };
    sample(0)?;
    let stats: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|j| sample(j).expect("validated parameters"))
        .collect();
    lower_bound_from_stats(&stats, n, q, confidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn zero_tail_is_binomial() {
        let t = stationary_zero_tail(4, 2).unwrap();
        let expect = [1.0, 7.0 / 8.0, 4.0 / 8.0, 1.0 / 8.0];
        for (a, b) in t.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_start() {
        let ci = tv_lower_statistic(5, 3, 0.0, 1000, 2).unwrap();
        let exact = 1.0 - 3f64.powi(-4);
        assert!((ci.point - exact).abs() < 1e-12);
        assert!(ci.lower < exact && ci.lower > exact - 0.01);
    }

    #[test]
    fn mixed_chain_contains_zero() {
        let ci = tv_lower_statistic(3, 2, 100.0, 10_000, 4).unwrap();
        assert_eq!(ci.lower, 0.0);
        assert!(ci.point < 0.03);
    }

    #[test]
    fn stationary_null() {
        let mut rng = crate::rng::stream_rng(1, 99, 0);
        for (n, q) in [(4usize, 2u32), (6, 3)] {
            let stats: Vec<usize> = (0..100_000)
                .map(|_| (0..n - 1).filter(|_| rng.random_range(0..q) == 0).count())
                .collect();
            let ci = lower_bound_from_stats(&stats, n, q, 0.99).unwrap();
            assert_eq!(ci.lower, 0.0, "n={n} q={q}");
            assert!(ci.upper < 0.02);
        }
    }

    #[test]
    fn rejects_out_of_range_statistics() {
        assert!(lower_bound_from_stats(&[3], 3, 2, 0.99).is_err());
        assert!(lower_bound_from_stats(&[], 3, 2, 0.99).is_err());
    }
}
