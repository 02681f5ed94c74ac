//! `unitriwalk`: experiment runner for the unitriangular walk and the East model.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unitriwalk::gfq::Modulus;
use unitriwalk::harness::{
    run_to_output, scaling_fit, write_atomic, ExperimentConfig, ExperimentKind, OutputFormat,
};
use unitriwalk::walk::EventLog;
use unitriwalk::{Error, Result};

#[derive(Parser)]
#[command(name = "unitriwalk", version, about = "Mixing experiments for random walks on unitriangular groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo summaries of the continuous-time walk.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Print the event log of trajectory 0 instead of summaries.
        #[arg(long)]
        trajectory: bool,
    },
    /// Exact generator analysis: residuals, spectral gap, mixing time.
    Exact(Common),
    /// Certified upper bound on the distance to stationarity.
    Certify(Common),
    /// Spectral gap table of the East model.
    EastGap(Common),
    /// Certified mixing-time search with a scaling fit.
    TmixScan(Common),
    /// Distinguishing-statistic lower bound on the distance to stationarity.
    LowerBound(Common),
    /// Fit `T* = C n^alpha (log q)^beta` to rows of a tmix-scan CSV.
    Fit {
        /// CSV produced by `tmix-scan`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long = "T", value_delimiter = ',')]
    horizons: Vec<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn config(self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let mut c = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
                c.kind = kind;
                c
            }
            None => ExperimentConfig {
                kind,
                ..ExperimentConfig::default()
            },
        };
        if !self.n.is_empty() {
            c.n = self.n;
        }
        if !self.q.is_empty() {
            c.q = self.q;
        }
        if !self.p.is_empty() {
            c.p = self.p;
            if self.config.is_none() && matches!(kind, ExperimentKind::EastGap | ExperimentKind::Exact) {
                c.q.clear();
            }
        }
        if !self.horizons.is_empty() {
            c.horizons = self.horizons;
        }
        c.samples = self.samples.unwrap_or(c.samples);
        c.delta = self.delta.unwrap_or(c.delta);
        c.seed = self.seed.unwrap_or(c.seed);
        c.cap = self.cap.unwrap_or(c.cap);
        c.n0 = self.n0.or(c.n0);
        c.search.eps = self.eps.unwrap_or(c.search.eps);
        c.out = self.out.or(c.out);
        if let Some(f) = self.format {
            c.format = match f {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
        }
        c.validate()?;
        Ok(c)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_experiment(common: Common, kind: ExperimentKind) -> Result<()> {
    let config = common.config(kind)?;
    let text = run_to_output(&config)?;
    if config.out.is_none() {
        print!("{text}");
    }
    Ok(())
}

fn dump_trajectory(common: Common) -> Result<()> {
    let config = common.config(ExperimentKind::Simulate)?;
    let log = EventLog::sample(config.n[0], Modulus::new(config.q[0])?, config.horizons[0], config.seed)?;
    emit(&log.to_text(), config.out.as_ref())
}

/// Reads `(n, q, T*)` from the `tmix_continuous` rows of a result CSV.
fn fit_rows(text: &str) -> Result<Vec<(usize, u32, f64)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name}")))
    };
    let (cn, cq, cquantity, cvalue) = (col("n")?, col("q_or_p")?, col("quantity")?, col("value")?);
    let parse_err = |l: &str| Error::Parse(format!("bad row: {l}"));
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.get(cquantity) != Some(&"tmix_continuous") {
            continue;
        }
        let n = f.get(cn).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(line))?;
        let q = f.get(cq).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(line))?;
        let t = f.get(cvalue).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(line))?;
        rows.push((n, q, t));
    }
    Ok(rows)
}

fn fit(input: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let fit = scaling_fit(&fit_rows(&std::fs::read_to_string(input)?)?)?;
    emit(&(serde_json::to_string_pretty(&fit)? + "\n"), out.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { common, trajectory: true } => dump_trajectory(common),
        Command::Simulate { common, .. } => run_experiment(common, ExperimentKind::Simulate),
        Command::Exact(c) => run_experiment(c, ExperimentKind::Exact),
        Command::Certify(c) => run_experiment(c, ExperimentKind::Certify),
        Command::EastGap(c) => run_experiment(c, ExperimentKind::EastGap),
        Command::TmixScan(c) => run_experiment(c, ExperimentKind::Scaling),
        Command::LowerBound(c) => run_experiment(c, ExperimentKind::LowerBound),
        Command::Fit { input, out } => fit(input, out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
