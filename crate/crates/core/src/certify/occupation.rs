use rayon::prelude::*;
use serde::Serialize;

use super::stats::ConfidenceInterval;
use crate::east::{east_events_from, east_stationary_sample, run_events, EastParams};
use crate::error::{Error, Result};
use crate::exact::{build_generator, spectral_gap, stationary, Model, StateSpace, DEFAULT_CAP};
use crate::gfq::{UnitriMatrix, Unitriangular};
use crate::path::SitePath;
use crate::rng::{stream_rng, LEZAUD_STREAM};
use crate::walk::EventLog;

/// Fraction of `[0, T]` the trajectory spends where `pred` holds.
pub fn occupation_fraction(path: &SitePath, pred: impl Fn(&[u32]) -> bool) -> Result<f64> {
    path.occupation_fraction(pred)
}

/// Confidence used for the empirical tail in [`lezaud_tail_check`].
pub const LEZAUD_CONFIDENCE: f64 = 0.99;

/// Empirical occupation-time tail against the Gaussian-type concentration
/// bound `(2 / sqrt(nu_min)) exp(-t eps^2 gap / 12)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LezaudReport {
    pub model: String,
    pub n: usize,
    pub parameter: String,
    pub t: f64,
    pub eps: f64,
    pub nu_a: f64,
    pub nu_min: f64,
    pub gap: f64,
    pub bound: f64,
    pub exceedances: u64,
    pub tail: ConfidenceInterval,
    pub passed: bool,
}

/// States are presented to `subset` as upper entries read row-major for
/// the group walk, and as full site vectors (pinned site first) for East.
/// Trajectories start from the stationary law.
pub fn lezaud_tail_check(
    model: Model,
    subset: impl Fn(&[u32]) -> bool + Sync,
    t: f64,
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<LezaudReport> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("t", format!("need a positive finite time, got {t}")));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", format!("need eps > 0, got {eps}")));
    }
    let space = StateSpace::with_cap(model, DEFAULT_CAP)?;
    let gen = build_generator(&space)?;
    let pi = stationary(&space);
    let gap = spectral_gap(&gen, &pi)?.gap;
    let state_of = |x: usize| match model {
        Model::GroupWalk { .. } => space.decode(x),
        Model::East { .. } => space.east_state(x),
    };
    let nu_a = pi.mass(|x| subset(&state_of(x)));
    let nu_min = pi.min_positive();
    let bound = 2.0 / nu_min.sqrt() * (-t * eps * eps * gap / 12.0).exp();

    let occupation = |j: u64| -> Result<f64> {
        let mut rng = stream_rng(seed, LEZAUD_STREAM, j);
        match model {
            Model::GroupWalk { n, modulus } => {
                let upper: Vec<u32> = (0..n * (n - 1) / 2)
                    .map(|_| rand::Rng::random_range(&mut rng, 0..modulus.get()))
                    .collect();
                let mut x = UnitriMatrix::from_upper_entries(n, &upper, modulus)?;
                let log = EventLog::sample_from(&mut rng, n, modulus, t)?;
                let mut inside = 0.0;
                let mut last = 0.0;
                let mut here = subset(&upper);
                for e in log.events() {
                    if here {
                        inside += e.time - last;
                    }
                    last = e.time;
                    x.add_row_multiple(e.clock, e.scalar);
                    here = subset(&x.upper_entries());
                }
                if here {
                    inside += t - last;
                }
                Ok(inside)
            }
            Model::East { n, flavor } => {
                let params = EastParams::new(n, flavor, t)?;
                let start = east_stationary_sample(&params, &mut rng);
                let events = east_events_from(&mut rng, n, t);
                Ok(run_events(&params, &start, &events)?.occupation_fraction(&subset)? * t)
            }
        }
    };
    occupation(0)?;
    let exceedances: u64 = (0..samples)
        .into_par_iter()
        .map(|j| {
            let occ = occupation(j).expect("validated parameters");
            u64::from((occ - t * nu_a).abs() > eps * t)
        })
        .sum();
    let tail = ConfidenceInterval::clopper_pearson(exceedances, samples, LEZAUD_CONFIDENCE)?;
    Ok(LezaudReport {
        model: model.label().to_string(),
        n: model.n(),
        parameter: model.parameter(),
        t,
        eps,
        nu_a,
        nu_min,
        gap,
        bound,
        exceedances,
        passed: tail.lower <= bound,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::east::{east_simulate, EastFlavor};

    #[test]
    fn constant_predicate() {
        let params = EastParams::new(4, EastFlavor::binary(0.5).unwrap(), 3.0).unwrap();
        let path = east_simulate(&params, &[1, 0, 1, 1], 7).unwrap();
        assert_eq!(occupation_fraction(&path, |_| true).unwrap(), 1.0);
        assert_eq!(occupation_fraction(&path, |_| false).unwrap(), 0.0);
        assert!(occupation_fraction(&SitePath::new(vec![1], 0.0), |_| true).is_err());
    }

    #[test]
    fn east_small_case_passes() {
        let model = Model::east(3, EastFlavor::binary(0.5).unwrap()).unwrap();
        let r = lezaud_tail_check(model, |h| h[2] == 1, 20.0, 0.3, 2000, 3).unwrap();
        assert!((r.nu_a - 0.5).abs() < 1e-12);
        assert!((r.nu_min - 0.25).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn walk_identity_subset() {
        let model = Model::group_walk(3, 2).unwrap();
        let r = lezaud_tail_check(model, |u| u.iter().all(|&x| x == 0), 30.0, 0.2, 2000, 5).unwrap();
        assert!((r.nu_a - 0.125).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn rejects_bad_arguments() {
        let model = Model::group_walk(3, 2).unwrap();
        assert!(lezaud_tail_check(model, |_| true, 0.0, 0.2, 10, 5).is_err());
        assert!(lezaud_tail_check(model, |_| true, 1.0, 0.0, 10, 5).is_err());
        let big = Model::group_walk(7, 2).unwrap();
        assert!(matches!(
            lezaud_tail_check(big, |_| true, 1.0, 0.1, 10, 5),
            Err(Error::CapExceeded { .. })
        ));
    }
}
