//! Transient distributions by uniformization: with `Lambda` the largest exit
//! rate and `P = I + L / Lambda`,
//! `mu e^{tL} = sum_k Poisson(k; Lambda t) mu P^k`.

use crate::error::{Error, Result};

use super::generator::{total_variation, DistVector, RateMatrix};

/// Poisson tail mass left out by the truncation.
pub const TRUNCATION_TAIL: f64 = 1e-14;

const MAX_TIME_DOUBLINGS: usize = 60;

fn check_len(gen: &RateMatrix, len: usize) -> Result<()> {
    if gen.size() != len {
        return Err(Error::DimensionMismatch(gen.size(), len));
    }
    Ok(())
}

/// `mu0 e^{tL}`, truncated once the Poisson tail is below
/// [`TRUNCATION_TAIL`], then continued for `extra_terms` more terms.
pub fn transient_with(gen: &RateMatrix, mu0: &[f64], t: f64, extra_terms: usize) -> Result<Vec<f64>> {
    check_len(gen, mu0.len())?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("need finite t >= 0, got {t}")));
    }
    let lambda = gen.max_exit_rate();
    if t == 0.0 || lambda == 0.0 {
        return Ok(mu0.to_vec());
    }
    let lt = lambda * t;
    let size = mu0.len();
    let mut v = mu0.to_vec();
    let mut flow = vec![0.0; size];
    let mut acc = vec![0.0; size];
    let mut log_w = -lt;
    let mut k = 0usize;
    let mut extra = None;
    loop {
        let w = log_w.exp();
        if w > 0.0 {
            for (a, &x) in acc.iter_mut().zip(&v) {
                *a += w * x;
            }
        }
        if let Some(left) = extra.as_mut() {
            if *left == 0 {
                break;
            }
            *left -= 1;
        } else if (k as f64) > lt {
            // Tail after k is at most w_{k+1} / (1 - lt / (k + 2)).
            let next = log_w + (lt / (k + 1) as f64).ln();
            let tail = next.exp() / (1.0 - lt / (k + 2) as f64);
            if tail < TRUNCATION_TAIL {
                if extra_terms == 0 {
                    break;
                }
                extra = Some(extra_terms - 1);
            }
        }
        gen.left_mul(&v, &mut flow);
        for (x, &f) in v.iter_mut().zip(&flow) {
            *x += f / lambda;
        }
        k += 1;
        log_w += (lt / k as f64).ln();
    }
    Ok(acc)
}

pub fn transient(gen: &RateMatrix, mu0: &[f64], t: f64) -> Result<Vec<f64>> {
    transient_with(gen, mu0, t, 0)
}

/// `|| mu0 e^{tL} - pi ||_TV` at each time.
pub fn tv_curve(gen: &RateMatrix, mu0: &DistVector, pi: &DistVector, times: &[f64]) -> Result<Vec<f64>> {
    tv_curve_with(gen, mu0, pi, times, 0)
}

pub fn tv_curve_with(
    gen: &RateMatrix,
    mu0: &DistVector,
    pi: &DistVector,
    times: &[f64],
    extra_terms: usize,
) -> Result<Vec<f64>> {
    check_len(gen, pi.len())?;
    times
        .iter()
        .map(|&t| Ok(total_variation(&transient_with(gen, mu0.as_slice(), t, extra_terms)?, pi.as_slice())))
        .collect()
}

/// Law after `steps` steps of the discrete chain `P = I + L / scale`.
/// `scale` must be at least the largest exit rate.
pub fn discrete_distribution(gen: &RateMatrix, mu0: &[f64], steps: usize, scale: f64) -> Result<Vec<f64>> {
    check_len(gen, mu0.len())?;
    if scale < gen.max_exit_rate() - 1e-12 {
        return Err(Error::invalid("scale", "below the largest exit rate"));
    }
    let mut v = mu0.to_vec();
    let mut flow = vec![0.0; v.len()];
    for _ in 0..steps {
        gen.left_mul(&v, &mut flow);
        for (x, &f) in v.iter_mut().zip(&flow) {
            *x += f / scale;
        }
    }
    Ok(v)
}

/// Smallest `t` (to within `1e-6`) with `max_{mu in starts} TV(mu e^{tL}, pi) <= eps`.
pub fn exact_tmix_from(gen: &RateMatrix, pi: &DistVector, starts: &[DistVector], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps", format!("need 0 < eps < 1, got {eps}")));
    }
    let worst = |t: f64| -> Result<f64> {
        let mut w = 0.0f64;
        for mu in starts {
            w = w.max(total_variation(&transient(gen, mu.as_slice(), t)?, pi.as_slice()));
        }
        Ok(w)
    };
    if worst(0.0)? <= eps {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while worst(hi)? > eps {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_TIME_DOUBLINGS {
            return Err(Error::NoBracket(hi));
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if worst(mid)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Worst case over all point-mass starts.
pub fn exact_tmix(gen: &RateMatrix, pi: &DistVector, eps: f64) -> Result<f64> {
    let starts: Vec<DistVector> = (0..gen.size()).map(|x| DistVector::point_mass(gen.size(), x)).collect();
    exact_tmix_from(gen, pi, &starts, eps)
}

/// `1 / (2e)`.
pub fn default_eps() -> f64 {
    1.0 / (2.0 * std::f64::consts::E)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::generator::{stationary, walk_generator};

    #[test]
    fn two_by_two_curve_is_exponential() {
        for q in [2u32, 3, 5] {
            let (space, gen) = walk_generator(2, q).unwrap();
            let pi = stationary(&space);
            let mu0 = DistVector::point_mass(space.size(), 0);
            let times = [0.0, 0.3, 1.0, 2.5, 7.0, 30.0];
            let tv = tv_curve(&gen, &mu0, &pi, &times).unwrap();
            for (&t, &d) in times.iter().zip(&tv) {
                let want = (-t).exp() * (1.0 - 1.0 / q as f64);
                assert!((d - want).abs() < 1e-12, "q={q} t={t} {d} vs {want}");
            }
        }
    }

    #[test]
    fn closed_form_mixing_times() {
        let eps = default_eps();
        let (space, gen) = walk_generator(2, 2).unwrap();
        let t = exact_tmix(&gen, &stationary(&space), eps).unwrap();
        assert!((t - 1.0).abs() < 2e-6, "{t}");
        let (space, gen) = walk_generator(2, 3).unwrap();
        let t = exact_tmix(&gen, &stationary(&space), eps).unwrap();
        assert!((t - (1.0 + (4.0f64 / 3.0).ln())).abs() < 2e-6, "{t}");

        let (space, gen) = walk_generator(3, 2).unwrap();
        let pi = stationary(&space);
        let loose = exact_tmix(&gen, &pi, 0.3).unwrap();
        let tight = exact_tmix(&gen, &pi, 0.1).unwrap();
        assert!(tight >= loose);
        assert!(exact_tmix(&gen, &pi, 1.5).is_err());
    }

    #[test]
    fn long_times_and_large_uniformization_rates() {
        let (space, gen) = walk_generator(3, 2).unwrap();
        let pi = stationary(&space);
        let mu0 = DistVector::point_mass(space.size(), 0);
        let tv = tv_curve(&gen, &mu0, &pi, &[0.0, 200.0, 2000.0]).unwrap();
        assert!((tv[0] - (1.0 - 1.0 / 8.0)).abs() < 1e-15);
        assert!(tv[1] < 1e-10 && tv[2] < 1e-10);
        let mass: f64 = transient(&gen, mu0.as_slice(), 2000.0).unwrap().iter().sum();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn discrete_chain_two_by_two() {
        let (space, gen) = walk_generator(2, 2).unwrap();
        let mu0 = DistVector::point_mass(space.size(), 0);
        let d = discrete_distribution(&gen, mu0.as_slice(), 1, 1.0).unwrap();
        assert_eq!(d, vec![0.5, 0.5]);
        assert!(discrete_distribution(&gen, mu0.as_slice(), 1, 0.1).is_err());
    }
}
