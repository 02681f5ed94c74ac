use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use super::fit::scaling_fit;
use super::output::{render_csv, write_atomic, ResultRow};
use super::search::{tmix_search, CertificateParams};
use crate::certify::{certified_tv_upper, default_base_level, last_column_zeros, tv_lower_statistic};
use crate::east::EastFlavor;
use crate::error::{Error, Result};
use crate::exact::{gap_table, summarize, Model};
use crate::gfq::Modulus;
use crate::walk::{evolve_forward, EventLog};

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "UNITRIWALK_THREADS";

/// Worker count from `UNITRIWALK_THREADS`, else the available parallelism.
pub fn worker_threads() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |k| k.get()))
}

/// Rows plus the structured results of one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub results: serde_json::Value,
}

/// Renders the report in the configured format.
pub fn render(config: &ExperimentConfig, report: &RunReport) -> String {
    match config.format {
        OutputFormat::Csv => render_csv(config, &report.rows),
        OutputFormat::Json => {
            let doc = json!({
                "config": config,
                "config_hash": format!("{:016x}", config.hash()),
                "results": report.results,
            });
            serde_json::to_string_pretty(&doc).expect("results serialize") + "\n"
        }
    }
}

/// Runs the experiment and writes the rendered output to `config.out`
/// (atomically) when set. Returns the rendered output.
pub fn run_to_output(config: &ExperimentConfig) -> Result<String> {
    let report = run(config)?;
    let text = render(config, &report);
    if let Some(path) = &config.out {
        write_atomic(path, &text)?;
    }
    Ok(text)
}

pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads())
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    pool.install(|| match config.kind {
        ExperimentKind::Simulate => run_simulate(config),
        ExperimentKind::Exact => run_exact(config),
        ExperimentKind::Certify => run_certify(config),
        ExperimentKind::EastGap => run_east_gap(config),
        ExperimentKind::Scaling => run_scaling(config),
        ExperimentKind::LowerBound => run_lower_bound(config),
    })
}

struct Rows<'a> {
    config: &'a ExperimentConfig,
    start: Instant,
    rows: Vec<ResultRow>,
}

impl<'a> Rows<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Rows {
            config,
            start: Instant::now(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, n: usize, q_or_p: &str, t: Option<f64>, quantity: &str, value: f64, unc: Option<f64>) {
        self.rows.push(ResultRow {
            kind: self.config.kind.label().to_string(),
            n,
            q_or_p: q_or_p.to_string(),
            horizon: t,
            quantity: quantity.to_string(),
            value,
            uncertainty: unc,
            seed: self.config.seed,
            walltime_s: self.start.elapsed().as_secs_f64(),
        });
    }
}

fn grid(config: &ExperimentConfig) -> Vec<(usize, u32, f64)> {
    let mut out = Vec::new();
    for &n in &config.n {
        for &q in &config.q {
            for &t in &config.horizons {
                out.push((n, q, t));
            }
        }
    }
    out
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    (mean, (var / k).sqrt())
}

fn run_simulate(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    for (n, q, t) in grid(config) {
        let modulus = Modulus::new(q)?;
        EventLog::sample(n, modulus, t, config.seed)?;
        let draws: Vec<(f64, f64, f64)> = (0..config.samples)
            .into_par_iter()
            .map(|j| {
                let log = EventLog::sample_indexed(n, modulus, t, config.seed, j).expect("validated parameters");
                let x = evolve_forward(&log);
                (
                    log.events().len() as f64,
                    last_column_zeros(&log) as f64,
                    f64::from(u8::from(x.is_identity())),
                )
            })
            .collect();
        let q_label = q.to_string();
        for (name, pick) in [
            ("events", 0usize),
            ("last_column_zeros", 1),
            ("identity_fraction", 2),
        ] {
            let xs: Vec<f64> = draws.iter().map(|d| [d.0, d.1, d.2][pick]).collect();
            let (mean, err) = mean_and_error(&xs);
            rows.push(n, &q_label, Some(t), name, mean, Some(err));
        }
    }
    Ok(RunReport {
        results: serde_json::to_value(&rows.rows)?,
        rows: rows.rows,
    })
}

fn exact_models(config: &ExperimentConfig) -> Result<Vec<Model>> {
    let mut models = Vec::new();
    for &n in &config.n {
        for &q in &config.q {
            models.push(Model::group_walk(n, q)?);
        }
        for &p in &config.p {
            models.push(Model::east(n, EastFlavor::binary(p)?)?);
        }
    }
    Ok(models)
}

fn run_exact(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    let mut exact = Vec::new();
    for model in exact_models(config)? {
        for r in summarize(model, config.search.eps, config.cap)? {
            let unc = (r.residual != 0.0).then_some(r.residual);
            rows.push(r.n, &r.q_or_p, None, &format!("{}_{}", r.model, r.quantity), r.value, unc);
            exact.push(r);
        }
    }
    Ok(RunReport {
        rows: rows.rows,
        results: serde_json::to_value(&exact)?,
    })
}

fn run_certify(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    let mut reports = Vec::new();
    for (n, q, t) in grid(config) {
        let n0 = config
            .n0
            .unwrap_or_else(|| default_base_level(n, q, config.search.base_states))
            .min(n);
        let r = certified_tv_upper(n, q, t, n0, config.samples, config.delta, config.seed)?;
        let label = q.to_string();
        rows.push(n, &label, Some(t), "base_tv", r.base_tv, None);
        for l in &r.levels {
            let rate = l.failures as f64 / l.samples as f64;
            rows.push(n, &label, Some(t), &format!("span_failure_{}", l.i), rate, Some(l.ci_upper - rate));
        }
        rows.push(n, &label, Some(t), "tv_upper", r.bound, None);
        reports.push(r);
    }
    Ok(RunReport {
        rows: rows.rows,
        results: serde_json::to_value(&reports)?,
    })
}

fn run_east_gap(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    let mut flavors = Vec::new();
    for &q in &config.q {
        flavors.push(EastFlavor::qstate(q)?);
    }
    for &p in &config.p {
        flavors.push(EastFlavor::binary(p)?);
    }
    let top = *config.n.iter().max().expect("validated nonempty");
    let mut tables = Vec::new();
    for flavor in flavors {
        let label = match flavor {
            EastFlavor::Binary { p } => p.to_string(),
            EastFlavor::QState { modulus } => modulus.to_string(),
        };
        let table = gap_table(flavor, 2..=top, config.cap)?;
        for row in &table {
            rows.push(row.n, &label, None, "gap", row.result.gap, Some(row.result.residual));
            rows.push(row.n, &label, None, "running_inf", row.running_inf, None);
        }
        tables.push(json!({ "flavor": flavor.to_string(), "rows": table }));
    }
    Ok(RunReport {
        rows: rows.rows,
        results: serde_json::Value::Array(tables),
    })
}

fn run_scaling(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    let params = CertificateParams {
        samples: config.samples,
        delta: config.delta,
        seed: config.seed,
        n0: config.n0,
    };
    let mut searches = Vec::new();
    for &n in &config.n {
        for &q in &config.q {
            let s = tmix_search(n, q, &config.search, &params)?;
            let label = q.to_string();
            let width = Some(s.t_high - s.t_low);
            rows.push(n, &label, None, "tmix_continuous", s.t_star, width);
            rows.push(n, &label, None, "tmix_discrete_equiv", s.discrete_equivalent(), width.map(|w| (n - 1) as f64 * w));
            searches.push(s);
        }
    }
    let data: Vec<(usize, u32, f64)> = searches.iter().map(|s| (s.n, s.q, s.t_star)).collect();
    let fit = match scaling_fit(&data) {
        Ok(fit) => {
            rows.push(0, "all", None, "fit_alpha", fit.alpha, None);
            if let Some(beta) = fit.beta {
                rows.push(0, "all", None, "fit_beta", beta, None);
            }
            rows.push(0, "all", None, "fit_c", fit.c, None);
            rows.push(0, "all", None, "fit_residual", fit.residual, None);
            serde_json::to_value(&fit)?
        }
        Err(Error::DegenerateFit(_)) => serde_json::Value::Null,
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        rows: rows.rows,
        results: json!({ "searches": searches, "fit": fit }),
    })
}

fn run_lower_bound(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rows = Rows::new(config);
    let mut out = Vec::new();
    for (n, q, t) in grid(config) {
        let ci = tv_lower_statistic(n, q, t, config.samples, config.seed)?;
        let label = q.to_string();
        rows.push(n, &label, Some(t), "tv_lower", ci.lower, None);
        rows.push(n, &label, Some(t), "tv_lower_point", ci.point, Some(ci.upper - ci.lower));
        out.push(json!({ "n": n, "q": q, "T": t, "interval": ci }));
    }
    Ok(RunReport {
        rows: rows.rows,
        results: serde_json::Value::Array(out),
    })
}
