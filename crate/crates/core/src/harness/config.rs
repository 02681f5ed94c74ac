use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{default_eps, DEFAULT_CAP};
use crate::gfq::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Exact,
    Certify,
    EastGap,
    Scaling,
    LowerBound,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Exact => "exact",
            ExperimentKind::Certify => "certify",
            ExperimentKind::EastGap => "east-gap",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::LowerBound => "lower-bound",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Bracketing and bisection settings for the mixing-time search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    pub eps: f64,
    /// First horizon tried by the doubling bracket.
    pub t_start: f64,
    /// The bracket search fails beyond this horizon.
    pub t_cap: f64,
    pub rel_tol: f64,
    /// Largest state count allowed for the exact base level.
    pub base_states: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            eps: default_eps(),
            t_start: 1.0,
            t_cap: 1.0e4,
            rel_tol: 0.05,
            base_states: 1 << 12,
        }
    }
}

/// A batch of runs over the product of the parameter lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: Vec<usize>,
    pub q: Vec<u32>,
    /// Binary East parameters (`east-gap` and `exact` only).
    pub p: Vec<f64>,
    #[serde(rename = "T")]
    pub horizons: Vec<f64>,
    pub search: SearchSpec,
    pub samples: u64,
    pub delta: f64,
    pub seed: u64,
    /// Exact base level of certificates; chosen from `search.base_states`
    /// when absent.
    pub n0: Option<usize>,
    pub cap: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Exact,
            n: vec![3],
            q: vec![2],
            p: Vec::new(),
            horizons: vec![1.0],
            search: SearchSpec::default(),
            samples: 10_000,
            delta: 0.01,
            seed: 1,
            n0: None,
            cap: DEFAULT_CAP,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let uses_q = !(matches!(self.kind, ExperimentKind::EastGap | ExperimentKind::Exact) && !self.p.is_empty());
        if self.n.is_empty() {
            return Err(Error::invalid("n", "list must be nonempty"));
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 2) {
            return Err(Error::invalid("n", format!("entries must be at least 2, got {n}")));
        }
        if uses_q && self.q.is_empty() {
            return Err(Error::invalid("q", "list must be nonempty"));
        }
        if let Some(&q) = self.q.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::invalid("q", format!("entries must be prime, got {q}")));
        }
        if let Some(&p) = self.p.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("p", format!("entries must lie in (0, 1), got {p}")));
        }
        let needs_t = matches!(
            self.kind,
            ExperimentKind::Simulate | ExperimentKind::Certify | ExperimentKind::LowerBound
        );
        if needs_t && self.horizons.is_empty() {
            return Err(Error::invalid("T", "list must be nonempty"));
        }
        if let Some(&t) = self.horizons.iter().find(|&&t| !(t.is_finite() && t >= 0.0)) {
            return Err(Error::invalid("T", format!("entries must be finite and >= 0, got {t}")));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if self.n0.is_some_and(|n0| n0 < 2) {
            return Err(Error::invalid("n0", "base level must be at least 2"));
        }
        let s = &self.search;
        if !(s.eps > 0.0 && s.eps < 1.0) {
            return Err(Error::invalid("search.eps", format!("must lie in (0, 1), got {}", s.eps)));
        }
        if !(s.t_start > 0.0 && s.t_cap >= s.t_start && s.t_cap.is_finite()) {
            return Err(Error::invalid("search.t_cap", "need 0 < t_start <= t_cap < inf"));
        }
        if !(s.rel_tol > 0.0 && s.rel_tol < 1.0) {
            return Err(Error::invalid("search.rel_tol", format!("must lie in (0, 1), got {}", s.rel_tol)));
        }
        Ok(())
    }

    /// FNV-1a digest of the canonical JSON form.
    pub fn hash(&self) -> u64 {
        self.to_json().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }
}
