use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfq::Modulus;
use crate::rng::{stream_rng, WALK_STREAM};

/// One ring of clock `clock` (0-based; it adds `scalar` times row
/// `clock + 1` to row `clock`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub clock: usize,
    pub scalar: u32,
}

/// Time-ordered Poisson clock rings of the continuous-time walk on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventLog {
    n: usize,
    modulus: Modulus,
    horizon: f64,
    seed: u64,
    events: Vec<Event>,
}

fn validate_params(n: usize, horizon: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::invalid("T", format!("need a finite T >= 0, got {horizon}")));
    }
    Ok(())
}

/// Fills `events` with the superposition of `clocks` rate-1 Poisson clocks on
/// `[0, horizon]`: exponential gaps at rate `clocks`, a uniform clock per
/// ring, and a uniform scalar in `Z_q` (zero included).
fn fill_events<R: Rng + ?Sized>(
    rng: &mut R,
    clocks: usize,
    q: u32,
    horizon: f64,
    events: &mut Vec<Event>,
) {
    events.clear();
    if clocks == 0 {
        return;
    }
    let rate = clocks as f64;
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / rate;
        if t > horizon {
            break;
        }
        let clock = rng.random_range(0..clocks);
        let scalar = rng.random_range(0..q);
        events.push(Event { time: t, clock, scalar });
    }
}

impl EventLog {
    /// Samples the log for `(n, q, T, seed)`.
    pub fn sample(n: usize, modulus: Modulus, horizon: f64, seed: u64) -> Result<Self> {
        Self::sample_indexed(n, modulus, horizon, seed, 0)
    }

    /// Trajectory `index` of the batch keyed by `seed`.
    pub fn sample_indexed(
        n: usize,
        modulus: Modulus,
        horizon: f64,
        seed: u64,
        index: u64,
    ) -> Result<Self> {
        let mut rng = stream_rng(seed, WALK_STREAM, index);
        let mut log = Self::sample_from(&mut rng, n, modulus, horizon)?;
        log.seed = seed;
        Ok(log)
    }

    /// Samples a log from an arbitrary generator (recorded seed 0).
    pub fn sample_from<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        modulus: Modulus,
        horizon: f64,
    ) -> Result<Self> {
        validate_params(n, horizon)?;
        let mut events = Vec::new();
        fill_events(rng, n - 1, modulus.get(), horizon, &mut events);
        Ok(EventLog {
            n,
            modulus,
            horizon,
            seed: 0,
            events,
        })
    }

    /// Builds a log from explicit events (hand-built fixtures, replays).
    /// Equal times are allowed and kept in insertion order.
    pub fn from_events(
        n: usize,
        modulus: Modulus,
        horizon: f64,
        events: Vec<Event>,
    ) -> Result<Self> {
        validate_params(n, horizon)?;
        let mut last = 0.0;
        for e in &events {
            if !(e.time > 0.0 && e.time <= horizon) || e.time < last {
                return Err(Error::invalid(
                    "events",
                    format!("event time {} out of order or outside (0, {horizon}]", e.time),
                ));
            }
            if e.clock + 1 >= n {
                return Err(Error::IndexOutOfRange {
                    index: e.clock,
                    limit: n - 1,
                });
            }
            if e.scalar >= modulus.get() {
                return Err(Error::invalid("events", format!("scalar {} not reduced mod q", e.scalar)));
            }
            last = e.time;
        }
        Ok(EventLog {
            n,
            modulus,
            horizon,
            seed: 0,
            events,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Separates the rings of clocks `0..n-2` (the row operations that do
    /// not touch row `n-1`) from those of the last clock.
    pub fn split(&self) -> SplitLog {
        let last = self.n - 2;
        let (last_events, f_events) = self.events.iter().partition(|e| e.clock == last);
        SplitLog {
            n: self.n,
            modulus: self.modulus,
            horizon: self.horizon,
            f_events,
            last_events,
        }
    }

    /// The log seen by the leading `k x k` block: clocks `< k - 1` only.
    pub fn restrict(&self, k: usize) -> Result<EventLog> {
        if k < 2 || k > self.n {
            return Err(Error::invalid("k", format!("block size {k} not in 2..={}", self.n)));
        }
        Ok(EventLog {
            n: k,
            modulus: self.modulus,
            horizon: self.horizon,
            seed: self.seed,
            events: self.events.iter().copied().filter(|e| e.clock + 1 < k).collect(),
        })
    }

    /// Header `n q T seed`, then `time<TAB>clock<TAB>scalar` per event with
    /// clocks numbered from 1.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.n, self.modulus, self.horizon, self.seed);
        for e in &self.events {
            writeln!(out, "{}\t{}\t{}", e.time, e.clock + 1, e.scalar).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<EventLog> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty event log".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let parse_err = |what: &str, s: &str| Error::Parse(format!("bad {what} `{s}`"));
        let n: usize = fields[0].parse().map_err(|_| parse_err("n", fields[0]))?;
        let q: u32 = fields[1].parse().map_err(|_| parse_err("q", fields[1]))?;
        let horizon: f64 = fields[2].parse().map_err(|_| parse_err("T", fields[2]))?;
        let seed: u64 = fields[3].parse().map_err(|_| parse_err("seed", fields[3]))?;
        let mut events = Vec::new();
        for line in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("bad event line `{line}`")));
            }
            let time: f64 = cols[0].parse().map_err(|_| parse_err("time", cols[0]))?;
            let clock: usize = cols[1].parse().map_err(|_| parse_err("clock", cols[1]))?;
            let scalar: u32 = cols[2].parse().map_err(|_| parse_err("scalar", cols[2]))?;
            if clock == 0 {
                return Err(parse_err("clock", cols[1]));
            }
            events.push(Event {
                time,
                clock: clock - 1,
                scalar,
            });
        }
        let mut log = EventLog::from_events(n, Modulus::new(q)?, horizon, events)?;
        log.seed = seed;
        Ok(log)
    }
}

/// The log separated into the rings of clocks `0..n-2` (`f_events`) and of
/// the last clock `n-2` (`last_events`).
#[derive(Clone, Debug, PartialEq)]
pub struct SplitLog {
    n: usize,
    modulus: Modulus,
    horizon: f64,
    f_events: Vec<Event>,
    last_events: Vec<Event>,
}

impl SplitLog {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn f_events(&self) -> &[Event] {
        &self.f_events
    }

    pub fn last_events(&self) -> &[Event] {
        &self.last_events
    }

    /// `N(t)`: rings of clocks `0..n-2` up to time `t`.
    pub fn f_count(&self, t: f64) -> usize {
        self.f_events.partition_point(|e| e.time <= t)
    }

    /// `J(t)`: rings of the last clock up to time `t`.
    pub fn last_count(&self, t: f64) -> usize {
        self.last_events.partition_point(|e| e.time <= t)
    }

    /// Merges back into a single log.
    pub fn merge(&self) -> EventLog {
        let mut events: Vec<Event> = self.f_events.iter().chain(&self.last_events).copied().collect();
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        EventLog {
            n: self.n,
            modulus: self.modulus,
            horizon: self.horizon,
            seed: 0,
            events,
        }
    }
}
