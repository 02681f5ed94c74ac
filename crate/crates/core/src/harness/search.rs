use serde::Serialize;

use super::config::SearchSpec;
use crate::certify::{certify_with_profiles, default_base_level, ExactBase, SpanProfile};
use crate::error::{Error, Result};
use crate::exact::DEFAULT_CAP;
use crate::gfq::Modulus;

/// Monte Carlo settings shared by every certificate of a search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateParams {
    pub samples: u64,
    pub delta: f64,
    pub seed: u64,
    /// Base level; the largest level within `search.base_states` states if
    /// absent.
    pub n0: Option<usize>,
}

impl Default for CertificateParams {
    fn default() -> Self {
        CertificateParams {
            samples: 10_000,
            delta: 0.01,
            seed: 1,
            n0: None,
        }
    }
}

/// Result of bisecting the certified bound against `eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TmixSearch {
    pub n: usize,
    pub q: u32,
    pub eps: f64,
    pub base_n0: usize,
    /// `t_high`: the smallest tested horizon certified below `eps`.
    pub t_star: f64,
    pub t_low: f64,
    pub t_high: f64,
    pub bound_low: f64,
    pub bound_high: f64,
    pub certificates: usize,
}

impl TmixSearch {
    /// The lazy discrete chain makes one move per `n - 1` clock rings.
    pub fn discrete_equivalent(&self) -> f64 {
        (self.n - 1) as f64 * self.t_star
    }
}

/// Smallest certified mixing time, to relative tolerance `search.rel_tol`.
///
/// Every certificate in the search reads the same span-time profiles, so
/// the certified bound is nonincreasing in `T` and bisection is sound.
pub fn tmix_search(n: usize, q: u32, search: &SearchSpec, params: &CertificateParams) -> Result<TmixSearch> {
    let modulus = Modulus::new(q)?;
    let n0 = params
        .n0
        .unwrap_or_else(|| default_base_level(n, q, search.base_states))
        .min(n);
    let base = ExactBase::new(n0, q, DEFAULT_CAP)?;
    let profiles = (n0 + 1..=n)
        .map(|i| SpanProfile::sample(i, modulus, params.samples, params.seed, search.t_cap))
        .collect::<Result<Vec<_>>>()?;
    let mut certificates = 0;
    let mut bound = |t: f64| {
        certificates += 1;
        certify_with_profiles(&base, &profiles, n, t, params.delta).map(|r| r.bound)
    };
    let (mut t_low, mut bound_low) = (0.0, bound(0.0)?);
    let mut t_high = search.t_start;
    let mut bound_high = bound(t_high)?;
    while bound_high > search.eps {
        if t_high >= search.t_cap {
            return Err(Error::NoBracket(search.t_cap));
        }
        (t_low, bound_low) = (t_high, bound_high);
        t_high = (2.0 * t_high).min(search.t_cap);
        bound_high = bound(t_high)?;
    }
    while t_high - t_low > search.rel_tol * t_high {
        let mid = 0.5 * (t_low + t_high);
        let b = bound(mid)?;
        if b > search.eps {
            (t_low, bound_low) = (mid, b);
        } else {
            (t_high, bound_high) = (mid, b);
        }
    }
    Ok(TmixSearch {
        n,
        q,
        eps: search.eps,
        base_n0: n0,
        t_star: t_high,
        t_low,
        t_high,
        bound_low,
        bound_high,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let r = tmix_search(2, 2, &SearchSpec::default(), &CertificateParams::default()).unwrap();
        assert_eq!(r.base_n0, 2);
        assert!(r.t_low < 1.0 && 1.0 <= r.t_high, "{r:?}");
        assert!(r.t_high - r.t_low <= 0.05 * r.t_high);
        assert!(r.bound_low > r.eps && r.bound_high <= r.eps);
        assert_eq!(r.discrete_equivalent(), r.t_star);
    }

    #[test]
    fn no_bracket_below_the_cap() {
        let search = SearchSpec {
            t_cap: 2.0,
            ..SearchSpec::default()
        };
        let params = CertificateParams {
            samples: 200,
            ..CertificateParams::default()
        };
        assert!(matches!(tmix_search(6, 2, &search, &params), Err(Error::NoBracket(_))));
    }
}
