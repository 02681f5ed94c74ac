use serde::{Deserialize, Serialize};

use super::span::SpanProfile;
use super::stats::ConfidenceInterval;
use crate::error::{Error, Result};
use crate::exact::{identity_index, stationary, transient, walk_generator, DistVector, RateMatrix, DEFAULT_CAP};
use crate::gfq::Modulus;

/// Span-failure evidence at one level of the recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelBound {
    pub i: usize,
    pub samples: u64,
    pub failures: u64,
    pub ci_upper: f64,
}

/// `d_n(T) <= d_{n0}(T) + sum_{n0 < i <= n} P(A(T, i)^c)` with every
/// probability replaced by an exact upper confidence bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    pub q: u32,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub base_n0: usize,
    pub base_tv: f64,
    pub levels: Vec<LevelBound>,
    pub bound: f64,
    pub delta: f64,
}

/// Exact `d_{n0}(t)` from the identity, with the generator built once.
#[derive(Clone, Debug)]
pub struct ExactBase {
    n0: usize,
    modulus: Modulus,
    gen: RateMatrix,
    pi: DistVector,
    start: Vec<f64>,
}

impl ExactBase {
    pub fn new(n0: usize, q: u32, cap: usize) -> Result<Self> {
        let modulus = Modulus::new(q)?;
        if n0 < 2 {
            return Err(Error::invalid("n0", format!("base level must be at least 2, got {n0}")));
        }
        let (space, gen) = walk_generator(n0, q).and_then(|(space, gen)| {
            if space.size() > cap {
                Err(Error::CapExceeded {
                    size: space.size() as u128,
                    cap,
                })
            } else {
                Ok((space, gen))
            }
        })?;
        let pi = stationary(&space);
        let start = DistVector::point_mass(space.size(), identity_index(&space)).as_slice().to_vec();
        Ok(ExactBase {
            n0,
            modulus,
            gen,
            pi,
            start,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn tv(&self, t: f64) -> Result<f64> {
        Ok(self.pi.tv(&transient(&self.gen, &self.start, t)?))
    }
}

/// Largest level whose walk has at most `max_states` states, capped at `n`.
pub fn default_base_level(n: usize, q: u32, max_states: usize) -> usize {
    let mut n0 = 2;
    while n0 < n {
        let digits = ((n0 + 1) * n0 / 2) as u32;
        match (q as u128).checked_pow(digits) {
            Some(size) if size <= max_states as u128 => n0 += 1,
            _ => break,
        }
    }
    n0
}

/// Certificate with confidence `1 - delta`, the budget split evenly over
/// the `n - n0` Monte Carlo levels. Level `i` uses its own trajectories.
pub fn certified_tv_upper(
    n: usize,
    q: u32,
    horizon: f64,
    n0: usize,
    samples: u64,
    delta: f64,
    seed: u64,
) -> Result<CertificateReport> {
    let base = ExactBase::new(n0, q, DEFAULT_CAP)?;
    certify_with_base(&base, n, horizon, samples, delta, seed)
}

pub fn certify_with_base(
    base: &ExactBase,
    n: usize,
    horizon: f64,
    samples: u64,
    delta: f64,
    seed: u64,
) -> Result<CertificateReport> {
    if n < base.n0() {
        return Err(Error::invalid("n0", format!("base level {} exceeds n = {n}", base.n0())));
    }
    let profiles = (base.n0() + 1..=n)
        .map(|i| SpanProfile::sample(i, base.modulus(), samples, seed, horizon))
        .collect::<Result<Vec<_>>>()?;
    certify_with_profiles(base, &profiles, n, horizon, delta)
}

/// Assembles the certificate at `T` from span-time profiles of the levels
/// `n0 + 1..=n` (in order), each sampled with a cap of at least `T`.
pub fn certify_with_profiles(
    base: &ExactBase,
    profiles: &[SpanProfile],
    n: usize,
    horizon: f64,
    delta: f64,
) -> Result<CertificateReport> {
    let n0 = base.n0();
    if n < n0 {
        return Err(Error::invalid("n0", format!("base level {n0} exceeds n = {n}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("need 0 < delta < 1, got {delta}")));
    }
    if profiles.len() != n - n0 || profiles.iter().zip(n0 + 1..).any(|(p, i)| p.n() != i) {
        return Err(Error::invalid("profiles", format!("need one profile per level {}..={n}", n0 + 1)));
    }
    let base_tv = base.tv(horizon)?;
    let level_confidence = 1.0 - delta / (n - n0).max(1) as f64;
    let mut levels = Vec::with_capacity(n - n0);
    for p in profiles {
        let failures = p.failures(horizon)?;
        let ci = ConfidenceInterval::upper_one_sided(failures, p.samples(), level_confidence)?;
        levels.push(LevelBound {
            i: p.n(),
            samples: p.samples(),
            failures,
            ci_upper: ci.upper,
        });
    }
    let bound = base_tv + levels.iter().map(|l| l.ci_upper).sum::<f64>();
    Ok(CertificateReport {
        n,
        q: base.modulus().get(),
        horizon,
        base_n0: n0,
        base_tv,
        levels,
        bound,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_only_certificate() {
        let r = certified_tv_upper(3, 2, 1.0, 3, 10, 0.01, 1).unwrap();
        assert!(r.levels.is_empty());
        assert_eq!(r.bound, r.base_tv);
    }

    #[test]
    fn two_by_two_base_is_closed_form() {
        let base = ExactBase::new(2, 2, DEFAULT_CAP).unwrap();
        for t in [0.0, 0.5, 1.0, 3.0] {
            assert!((base.tv(t).unwrap() - 0.5 * (-t as f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn long_horizon_is_tiny() {
        let r = certified_tv_upper(3, 2, 50.0, 2, 10_000, 0.01, 3).unwrap();
        assert!(r.base_tv < 1e-12);
        assert_eq!(r.levels[0].failures, 0);
        // 0 of 10^4 failures at 99%: upper bound ln(100)/10^4.
        assert!(r.bound < 1e-6 + 4.7e-4);
    }

    #[test]
    fn invalid_requests() {
        assert!(certified_tv_upper(3, 2, 1.0, 4, 10, 0.01, 1).is_err());
        assert!(certified_tv_upper(3, 2, 1.0, 1, 10, 0.01, 1).is_err());
        assert!(certified_tv_upper(3, 2, 1.0, 2, 0, 0.01, 1).is_err());
        assert!(certified_tv_upper(3, 2, 1.0, 2, 10, 0.0, 1).is_err());
        assert!(certified_tv_upper(3, 4, 1.0, 2, 10, 0.01, 1).is_err());
        assert!(matches!(ExactBase::new(7, 2, DEFAULT_CAP), Err(Error::CapExceeded { .. })));
        let base = ExactBase::new(2, 2, DEFAULT_CAP).unwrap();
        let p4 = SpanProfile::sample(4, Modulus::new(2).unwrap(), 10, 1, 5.0).unwrap();
        assert!(certify_with_profiles(&base, &[p4.clone()], 3, 1.0, 0.01).is_err());
        let p3 = SpanProfile::sample(3, Modulus::new(2).unwrap(), 10, 1, 5.0).unwrap();
        assert!(certify_with_profiles(&base, &[p3.clone(), p4.clone()], 4, 6.0, 0.01).is_err());
        assert!(certify_with_profiles(&base, &[p3, p4], 4, 5.0, 0.01).is_ok());
    }

    #[test]
    fn base_level_default() {
        assert_eq!(default_base_level(32, 2, 1 << 12), 5);
        assert_eq!(default_base_level(3, 2, 1 << 12), 3);
        assert_eq!(default_base_level(16, 3, 1 << 12), 4);
        assert_eq!(default_base_level(16, 7, 1 << 12), 3);
        assert_eq!(default_base_level(2, 7, 1 << 12), 2);
    }

    #[test]
    fn profiles_reproduce_direct_certificates() {
        let base = ExactBase::new(2, 3, DEFAULT_CAP).unwrap();
        let m = Modulus::new(3).unwrap();
        let profiles: Vec<SpanProfile> = (3..=5).map(|i| SpanProfile::sample(i, m, 500, 8, 20.0).unwrap()).collect();
        let mut last = f64::INFINITY;
        for t in [1.0, 3.0, 6.0, 12.0, 20.0] {
            let direct = certify_with_base(&base, 5, t, 500, 0.05, 8).unwrap();
            let shared = certify_with_profiles(&base, &profiles, 5, t, 0.05).unwrap();
            assert_eq!(direct, shared);
            assert!(shared.bound <= last);
            last = shared.bound;
        }
    }

    #[test]
    fn json_field_names() {
        let r = certified_tv_upper(3, 2, 2.0, 2, 100, 0.01, 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["n", "q", "T", "base_n0", "base_tv", "levels", "bound", "delta"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: CertificateReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
