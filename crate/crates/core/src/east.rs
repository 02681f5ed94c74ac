//! The continuous-time East model: sites `0..n`, site 0 pinned to 1, and a
//! rate-1 clock per site `i < n - 1` that refreshes site `i + 1` when site
//! `i` is active. The binary flavor refreshes to 1 with probability `p`; the
//! `q`-state flavor refreshes to a uniform element of `Z_q`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfq::Modulus;
use crate::path::{Change, SitePath};
use crate::rng::{stream_rng, EAST_STREAM};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EastFlavor {
    Binary { p: f64 },
    QState { modulus: Modulus },
}

impl EastFlavor {
    pub fn binary(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("need 0 < p < 1, got {p}")));
        }
        Ok(EastFlavor::Binary { p })
    }

    pub fn qstate(q: u32) -> Result<Self> {
        Ok(EastFlavor::QState {
            modulus: Modulus::new(q)?,
        })
    }

    /// Number of values a site can take.
    pub fn arity(self) -> u32 {
        match self {
            EastFlavor::Binary { .. } => 2,
            EastFlavor::QState { modulus } => modulus.get(),
        }
    }

    /// Stationary probability that a free site is active.
    pub fn active_probability(self) -> f64 {
        match self {
            EastFlavor::Binary { p } => p,
            EastFlavor::QState { modulus } => {
                let q = modulus.get() as f64;
                (q - 1.0) / q
            }
        }
    }

    /// Stationary probability of one free site value.
    pub fn site_weight(self, value: u32) -> f64 {
        match self {
            EastFlavor::Binary { p } => {
                if value == 1 {
                    p
                } else {
                    1.0 - p
                }
            }
            EastFlavor::QState { modulus } => 1.0 / modulus.get() as f64,
        }
    }

    /// Value written by a refresh driven by the uniform draw `u`.
    #[inline]
    pub fn refresh(self, u: f64) -> u32 {
        match self {
            EastFlavor::Binary { p } => (u < p) as u32,
            EastFlavor::QState { modulus } => {
                let q = modulus.get();
                ((u * q as f64) as u32).min(q - 1)
            }
        }
    }
}

impl fmt::Display for EastFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EastFlavor::Binary { p } => write!(f, "binary {p}"),
            EastFlavor::QState { modulus } => write!(f, "qstate {modulus}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EastParams {
    pub n: usize,
    pub flavor: EastFlavor,
    pub horizon: f64,
}

impl EastParams {
    pub fn new(n: usize, flavor: EastFlavor, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "East model needs at least one site"));
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::invalid("T", format!("need a finite T >= 0, got {horizon}")));
        }
        Ok(EastParams { n, flavor, horizon })
    }

    /// `(1, 0, ..., 0)`.
    pub fn empty_state(&self) -> Vec<u32> {
        let mut h = vec![0; self.n];
        h[0] = 1;
        h
    }

    pub fn validate_state(&self, h: &[u32]) -> Result<()> {
        if h.len() != self.n {
            return Err(Error::DimensionMismatch(h.len(), self.n));
        }
        if h[0] != 1 {
            return Err(Error::invalid("initial", "site 0 must be pinned to 1"));
        }
        let k = self.flavor.arity();
        if let Some(&bad) = h.iter().find(|&&x| x >= k) {
            return Err(Error::invalid("initial", format!("site value {bad} >= {k}")));
        }
        Ok(())
    }
}

/// A configuration of the binary East model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EastStateBinary {
    h: Vec<u32>,
}

/// A configuration of the `q`-state East model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EastStateQ {
    modulus: Modulus,
    h: Vec<u32>,
}

impl EastStateBinary {
    pub fn new(h: Vec<u32>) -> Result<Self> {
        if h.first() != Some(&1) || h.iter().any(|&x| x > 1) {
            return Err(Error::invalid("h", "binary East state must be 0/1 with h[0] = 1"));
        }
        Ok(EastStateBinary { h })
    }

    pub fn sites(&self) -> &[u32] {
        &self.h
    }
}

impl EastStateQ {
    pub fn new(h: Vec<u32>, modulus: Modulus) -> Result<Self> {
        if h.first() != Some(&1) || h.iter().any(|&x| x >= modulus.get()) {
            return Err(Error::invalid("h", "q-state East state needs values < q and h[0] = 1"));
        }
        Ok(EastStateQ { modulus, h })
    }

    pub fn sites(&self) -> &[u32] {
        &self.h
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
}

fn check_clock(n: usize, i: usize) -> Result<()> {
    if i + 1 >= n {
        return Err(Error::IndexOutOfRange {
            index: i,
            limit: n.saturating_sub(1),
        });
    }
    Ok(())
}

pub fn east_step_binary(h: &EastStateBinary, i: usize, u: f64, p: f64) -> Result<EastStateBinary> {
    check_clock(h.h.len(), i)?;
    let mut out = h.clone();
    if h.h[i] == 1 {
        out.h[i + 1] = (u < p) as u32;
    }
    Ok(out)
}

pub fn east_step_q(h: &EastStateQ, i: usize, u: f64) -> Result<EastStateQ> {
    check_clock(h.h.len(), i)?;
    let mut out = h.clone();
    if h.h[i] != 0 {
        out.h[i + 1] = EastFlavor::QState { modulus: h.modulus }.refresh(u);
    }
    Ok(out)
}

/// Coordinatewise zero/nonzero indicator.
pub fn psi_project(h: &EastStateQ) -> EastStateBinary {
    EastStateBinary {
        h: h.h.iter().map(|&x| (x != 0) as u32).collect(),
    }
}

/// Measure-preserving map of the `q`-state draw `u` to a binary draw with
/// `p = (q-1)/q`: the binary step writes 1 exactly when the `q`-state step
/// writes a nonzero value.
pub fn coupled_binary_draw(u: f64, q: u32) -> f64 {
    let qf = q as f64;
    let p = (qf - 1.0) / qf;
    let scaled = u * qf;
    if (scaled as u32).min(q - 1) != 0 {
        ((scaled - 1.0) / (qf - 1.0) * p).min(p * (1.0 - f64::EPSILON))
    } else {
        p + scaled * (1.0 - p)
    }
}

/// One clock ring: `(time, clock, uniform draw)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EastEvent {
    pub time: f64,
    pub clock: usize,
    pub u: f64,
}

/// Clock rings for trajectory `index` under `seed`.
pub fn east_events(n: usize, horizon: f64, seed: u64, index: u64) -> Vec<EastEvent> {
    let mut rng = stream_rng(seed, EAST_STREAM, index);
    east_events_from(&mut rng, n, horizon)
}

/// Clock rings on `[0, horizon]` drawn from `rng`.
pub fn east_events_from<R: Rng + ?Sized>(rng: &mut R, n: usize, horizon: f64) -> Vec<EastEvent> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let rate = (n - 1) as f64;
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / rate;
        if t > horizon {
            break;
        }
        let clock = rng.random_range(0..n - 1);
        out.push(EastEvent {
            time: t,
            clock,
            u: rng.random(),
        });
    }
    out
}

/// Runs the dynamics driven by `events`, recording only actual changes.
pub fn run_events(params: &EastParams, initial: &[u32], events: &[EastEvent]) -> Result<SitePath> {
    params.validate_state(initial)?;
    let mut h = initial.to_vec();
    let mut path = SitePath::new(h.clone(), params.horizon);
    for e in events.iter().take_while(|e| e.time <= params.horizon) {
        check_clock(params.n, e.clock)?;
        if h[e.clock] == 0 {
            continue;
        }
        let v = params.flavor.refresh(e.u);
        if v != h[e.clock + 1] {
            h[e.clock + 1] = v;
            path.push(Change {
                time: e.time,
                site: e.clock + 1,
                value: v,
            });
        }
    }
    Ok(path)
}

pub fn east_simulate(params: &EastParams, initial: &[u32], seed: u64) -> Result<SitePath> {
    east_simulate_indexed(params, initial, seed, 0)
}

pub fn east_simulate_indexed(
    params: &EastParams,
    initial: &[u32],
    seed: u64,
    index: u64,
) -> Result<SitePath> {
    params.validate_state(initial)?;
    let events = east_events(params.n, params.horizon, seed, index);
    run_events(params, initial, &events)
}

/// Draw from the product stationary measure.
pub fn east_stationary_sample<R: Rng + ?Sized>(params: &EastParams, rng: &mut R) -> Vec<u32> {
    let mut h = params.empty_state();
    for x in h.iter_mut().skip(1) {
        *x = params.flavor.refresh(rng.random());
    }
    h
}

/// Header `flavor n q|p T seed`, then `time<TAB>site<TAB>newvalue` lines
/// (sites numbered from 1).
pub fn trajectory_dump(params: &EastParams, seed: u64, path: &SitePath) -> String {
    let (flavor, param) = match params.flavor {
        EastFlavor::Binary { p } => ("binary", p.to_string()),
        EastFlavor::QState { modulus } => ("qstate", modulus.to_string()),
    };
    format!(
        "{flavor} {} {param} {} {seed}\n{}",
        params.n,
        params.horizon,
        path.change_lines()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(h: &[u32]) -> EastStateBinary {
        EastStateBinary::new(h.to_vec()).unwrap()
    }

    fn qs(h: &[u32], q: u32) -> EastStateQ {
        EastStateQ::new(h.to_vec(), Modulus::new(q).unwrap()).unwrap()
    }

    #[test]
    fn binary_step_examples() {
        assert_eq!(east_step_binary(&bin(&[1, 0, 0]), 1, 0.1, 0.5).unwrap(), bin(&[1, 0, 0]));
        assert_eq!(east_step_binary(&bin(&[1, 0]), 0, 0.2, 0.5).unwrap(), bin(&[1, 1]));
        assert_eq!(east_step_binary(&bin(&[1, 1, 1]), 0, 0.7, 0.5).unwrap(), bin(&[1, 0, 1]));
        assert_eq!(east_step_binary(&bin(&[1, 1, 1]), 1, 0.7, 0.5).unwrap(), bin(&[1, 1, 0]));
        assert!(east_step_binary(&bin(&[1, 1]), 1, 0.7, 0.5).is_err());
    }

    #[test]
    fn q_step_examples() {
        assert_eq!(east_step_q(&qs(&[1, 0, 2], 3), 1, 0.9).unwrap(), qs(&[1, 0, 2], 3));
        let mut counts = [0usize; 3];
        let mut rng = stream_rng(0, EAST_STREAM, 77);
        let draws = 30_000;
        for _ in 0..draws {
            let h = east_step_q(&qs(&[1, 2], 3), 0, rng.random()).unwrap();
            counts[h.sites()[1] as usize] += 1;
        }
        let sd = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 3.0).abs() < 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_project(&qs(&[1, 0, 2], 3)), bin(&[1, 0, 1]));
        assert_eq!(psi_project(&qs(&[1, 4, 2, 3], 5)), bin(&[1, 1, 1, 1]));
    }

    #[test]
    fn coupled_draw_agrees_and_preserves_uniformity() {
        for q in [2u32, 3, 5, 7] {
            let p = (q as f64 - 1.0) / q as f64;
            let mut below = 0usize;
            let grid = 10_000;
            for k in 0..grid {
                let u = (k as f64 + 0.5) / grid as f64;
                let v = coupled_binary_draw(u, q);
                assert!((0.0..1.0).contains(&v));
                let q_nonzero = EastFlavor::QState { modulus: Modulus::new(q).unwrap() }.refresh(u) != 0;
                assert_eq!(q_nonzero, v < p, "q={q} u={u}");
                if v < 0.5 {
                    below += 1;
                }
            }
            assert!((below as f64 / grid as f64 - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn single_site_is_constant() {
        let params = EastParams::new(1, EastFlavor::binary(0.5).unwrap(), 10.0).unwrap();
        let path = east_simulate(&params, &[1], 4).unwrap();
        assert!(path.changes().is_empty());
    }

    #[test]
    fn invalid_inputs() {
        assert!(EastFlavor::binary(1.0).is_err());
        assert!(EastFlavor::binary(0.0).is_err());
        assert!(EastFlavor::qstate(6).is_err());
        assert!(EastParams::new(0, EastFlavor::qstate(2).unwrap(), 1.0).is_err());
        let params = EastParams::new(3, EastFlavor::qstate(3).unwrap(), 1.0).unwrap();
        assert!(east_simulate(&params, &[0, 1, 1], 0).is_err());
        assert!(east_simulate(&params, &[1, 3, 1], 0).is_err());
        assert!(east_simulate(&params, &[1, 1], 0).is_err());
        assert!(EastStateBinary::new(vec![0, 1]).is_err());
    }

    #[test]
    fn two_site_binary_law() {
        // P(h_1(T) = 1) from (1,0) is p (1 - e^{-T}).
        let p = 0.3;
        let horizon = 1.5;
        let params = EastParams::new(2, EastFlavor::binary(p).unwrap(), horizon).unwrap();
        let runs = 20_000u64;
        let hits = (0..runs)
            .filter(|&k| east_simulate_indexed(&params, &[1, 0], 9, k).unwrap().final_state()[1] == 1)
            .count();
        let expect = p * (1.0 - (-horizon).exp());
        let sd = (expect * (1.0 - expect) / runs as f64).sqrt();
        assert!((hits as f64 / runs as f64 - expect).abs() < 3.0 * sd);
    }

    #[test]
    fn dump_format() {
        let params = EastParams::new(3, EastFlavor::qstate(3).unwrap(), 2.0).unwrap();
        let path = east_simulate(&params, &params.empty_state(), 5).unwrap();
        let dump = trajectory_dump(&params, 5, &path);
        let mut lines = dump.lines();
        assert_eq!(lines.next().unwrap(), "qstate 3 3 2 5");
        assert_eq!(lines.count(), path.changes().len());
    }
}
