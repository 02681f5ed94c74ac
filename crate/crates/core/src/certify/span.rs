use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::ConfidenceInterval;
use crate::error::{Error, Result};
use crate::gfq::{BitBasis, BitColumns, Modulus, RankBasis, UnitriMatrix, Unitriangular, MAX_BIT_DIM};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rng::{stream_rng, SPAN_STREAM};
use crate::walk::{sweep_backward, Event, EventLog, SplitLog};

/// Outcome of the span test for one split log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub n: usize,
    pub q: u32,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub spanned: bool,
    pub first_span_time: Option<f64>,
    /// `(s_k, rank)` at every ring that raised the rank.
    pub rank_path: Vec<(f64, usize)>,
}

/// The packed vectors `Y_{T-s_k} e_{n-2}` (rows `0..n-1`), indexed by `k`.
fn span_vectors_bits(split: &SplitLog) -> Vec<u64> {
    let n = split.n();
    let mut out = vec![0u64; split.last_events().len()];
    sweep_backward::<BitColumns>(split, |k, y| out[k] = y.column_bits(n - 2));
    out
}

fn span_vectors_general(split: &SplitLog) -> Vec<Vec<u32>> {
    let n = split.n();
    let mut out = vec![Vec::new(); split.last_events().len()];
    sweep_backward::<UnitriMatrix>(split, |k, y| {
        let mut v = vec![0; n - 1];
        y.column_into(n - 2, &mut v);
        out[k] = v;
    });
    out
}

/// Collects `v_k = Y_{T-s_k} e_{n-2}` restricted to the first `n-1`
/// coordinates and inserts them in order of `s_k`, stopping at full rank.
pub fn span_event_check(split: &SplitLog) -> SpanRecord {
    let n = split.n();
    let modulus = split.modulus();
    let times: Vec<f64> = split.last_events().iter().map(|e| e.time).collect();
    let target = n - 1;
    let mut rank_path = Vec::new();
    let mut first_span_time = None;
    let mut record = |k: usize, rank: usize| {
        rank_path.push((times[k], rank));
        if rank == target {
            first_span_time = Some(times[k]);
        }
    };
    if modulus.get() == 2 && n <= MAX_BIT_DIM {
        let mut basis = BitBasis::new();
        for (k, v) in span_vectors_bits(split).into_iter().enumerate() {
            if basis.insert(v) {
                record(k, basis.rank());
                if basis.rank() == target {
                    break;
                }
            }
        }
    } else {
        let mut basis = RankBasis::new(target, modulus);
        for (k, v) in span_vectors_general(split).iter().enumerate() {
            if basis.insert_raw(v) {
                record(k, basis.rank());
                if basis.is_full() {
                    break;
                }
            }
        }
    }
    SpanRecord {
        n,
        q: modulus.get(),
        horizon: split.horizon(),
        spanned: first_span_time.is_some(),
        first_span_time,
        rank_path,
    }
}

/// Ring of the walk's clocks indexed by backward time `u = T - s`.
#[derive(Clone, Copy, Debug)]
struct BackwardRing {
    u: f64,
    clock: usize,
    scalar: u32,
}

/// Poisson rings of `n - 1` rate-1 clocks in backward time. Reversing a
/// Poisson process on `[0, T]` preserves its law, so the rings with `u < T`
/// are a sample of the walk's log on `[0, T]` read from `T` down to 0.
struct BackwardRings {
    rng: ChaCha8Rng,
    clocks: usize,
    q: u32,
    u: f64,
}

impl BackwardRings {
    fn new(n: usize, modulus: Modulus, seed: u64, index: u64) -> Self {
        BackwardRings {
            rng: stream_rng(seed, SPAN_STREAM + n as u64, index),
            clocks: n - 1,
            q: modulus.get(),
            u: 0.0,
        }
    }
}

impl Iterator for BackwardRings {
    type Item = BackwardRing;

    fn next(&mut self) -> Option<BackwardRing> {
        let x: f64 = self.rng.random();
        self.u += -(1.0 - x).ln() / self.clocks as f64;
        Some(BackwardRing {
            u: self.u,
            clock: self.rng.random_range(0..self.clocks),
            scalar: self.rng.random_range(0..self.q),
        })
    }
}

fn check_level(n: usize, horizon: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
    }
    if !(horizon >= 0.0) {
        return Err(Error::invalid("T", format!("need T >= 0, got {horizon}")));
    }
    Ok(())
}

/// Split log of span trajectory `index` at level `n` on `[0, T]`.
pub fn span_log(n: usize, modulus: Modulus, horizon: f64, seed: u64, index: u64) -> Result<SplitLog> {
    check_level(n, horizon)?;
    if !horizon.is_finite() {
        return Err(Error::invalid("T", "need a finite horizon"));
    }
    let mut events: Vec<Event> = BackwardRings::new(n, modulus, seed, index)
        .take_while(|r| r.u < horizon)
        .map(|r| Event {
            time: horizon - r.u,
            clock: r.clock,
            scalar: r.scalar,
        })
        .collect();
    events.reverse();
    Ok(EventLog::from_events(n, modulus, horizon, events)?.split())
}

/// Backward time at which the span event first holds for trajectory
/// `index`: the vectors of the last-clock rings with `u < T` span exactly
/// when `T > span_time`. `None` if that time exceeds `cap`.
pub fn span_time(n: usize, modulus: Modulus, seed: u64, index: u64, cap: f64) -> Result<Option<f64>> {
    check_level(n, cap)?;
    let rings = BackwardRings::new(n, modulus, seed, index).take_while(|r| r.u < cap);
    let target = n - 1;
    if modulus.get() == 2 && n <= MAX_BIT_DIM {
        let mut y = BitColumns::identity(n)?;
        let mut basis = BitBasis::new();
        for r in rings {
            if r.clock == n - 2 {
                if basis.insert(y.column_bits(n - 2)) && basis.rank() == target {
                    return Ok(Some(r.u));
                }
            } else {
                y.add_col_multiple(r.clock, r.scalar);
            }
        }
    } else {
        let mut y = UnitriMatrix::identity(n, modulus);
        let mut basis = RankBasis::new(target, modulus);
        let mut v = vec![0; target];
        for r in rings {
            if r.clock == n - 2 {
                y.column_into(n - 2, &mut v);
                if basis.insert_raw(&v) && basis.is_full() {
                    return Ok(Some(r.u));
                }
            } else {
                y.add_col_multiple(r.clock, r.scalar);
            }
        }
    }
    Ok(None)
}

/// Span times of trajectories `0..samples` at level `n`, censored at `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanProfile {
    n: usize,
    cap: f64,
    /// Sorted; censored trajectories are stored as `f64::INFINITY`.
    times: Vec<f64>,
}

impl SpanProfile {
    pub fn sample(n: usize, modulus: Modulus, samples: u64, seed: u64, cap: f64) -> Result<Self> {
        check_level(n, cap)?;
        if samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample"));
        }
        let mut times: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|j| {
                span_time(n, modulus, seed, j, cap)
                    .expect("validated parameters")
                    .unwrap_or(f64::INFINITY)
            })
            .collect();
        times.sort_by(f64::total_cmp);
        Ok(SpanProfile { n, cap, times })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn samples(&self) -> u64 {
        self.times.len() as u64
    }

    /// Trajectories whose span event fails at horizon `T <= cap`.
    pub fn failures(&self, horizon: f64) -> Result<u64> {
        if horizon > self.cap {
            return Err(Error::invalid(
                "T",
                format!("horizon {horizon} beyond the profile cap {}", self.cap),
            ));
        }
        let spanned = self.times.partition_point(|&t| t < horizon);
        Ok((self.times.len() - spanned) as u64)
    }
}

/// Number of trajectories among `0..samples` on which the span event fails.
pub fn count_span_failures(n: usize, modulus: Modulus, horizon: f64, samples: u64, seed: u64) -> Result<u64> {
    SpanProfile::sample(n, modulus, samples, seed, horizon)?.failures(horizon)
}

/// Two-sided exact interval on `P(A(T, n)^c)`.
pub fn estimate_span_failure(
    n: usize,
    q: u32,
    horizon: f64,
    samples: u64,
    confidence: f64,
    seed: u64,
) -> Result<ConfidenceInterval> {
    let modulus = Modulus::new(q)?;
    let failures = count_span_failures(n, modulus, horizon, samples, seed)?;
    ConfidenceInterval::clopper_pearson(failures, samples, confidence)
}
