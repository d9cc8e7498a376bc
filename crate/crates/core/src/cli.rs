//! The `bregopt` command line.
//!
//! Exit codes: 0 when every executed check passes, 1 when a check fails or a
//! run errors, 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::driver::{self, RunTrace, Schedule, SolverConfig, SweepOptions, TstarMode};
use crate::envelope::{self, EnvelopeOptions};
use crate::error::{Error, Result};
use crate::problems::{self, ProblemInstance};

#[derive(Parser, Debug)]
#[command(name = "bregopt", version, about = "Stochastic model-based minimization under Bregman geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a problem instance as its JSON config.
    Show { problem: String },
    /// Check every assumption and geometry invariant of a problem.
    Validate {
        problem: String,
        /// Random pairs per sampled check.
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
    },
    /// One run: per-iteration CSV plus the envelope report at the returned point.
    Run {
        problem: String,
        #[arg(long = "T", alias = "horizon")]
        horizon: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Use η_t = 1/(μ(t+1)) with this μ.
        #[arg(long, conflicts_with = "alpha")]
        mu: Option<f64>,
        /// Random three-point probes per step (0 disables the check).
        #[arg(long, default_value_t = 0)]
        probes: usize,
        /// Trace CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Envelope report JSON destination (stderr when absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rate table over horizons and seeds, with a log-log slope fit.
    Sweep {
        problem: String,
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<usize>>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Draw)]
        mode: Mode,
        #[arg(long)]
        threads: Option<usize>,
        /// Sweep CSV destination (stdout when absent).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Slope JSON destination (stderr when absent).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Exit 1 unless the fitted slope is at most this.
        #[arg(long, allow_hyphen_values = true)]
        max_slope: Option<f64>,
    },
    /// Brute-force ground truth for `min F`.
    Oracle {
        problem: String,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Draw,
    Full,
}

/// One row of the `run` CSV: step `t` from `x_t` to `x_{t+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub eta: f64,
    pub xi: usize,
    pub model_value: f64,
    pub r_value: f64,
    pub step_divergence: f64,
    pub three_point_residual: f64,
    /// `x_{t+1}`, coordinates separated by `;`.
    pub x_next: String,
}

pub fn trace_rows(trace: &RunTrace) -> Vec<TraceRow> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| TraceRow {
            t,
            eta: trace.etas[t],
            xi: s.xi,
            model_value: s.model_value,
            r_value: s.r_value,
            step_divergence: s.step_divergence,
            three_point_residual: s.three_point_residual,
            x_next: trace.iterates[t + 1].iter().map(|v| decimal::format(*v)).collect::<Vec<_>>().join(";"),
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(trace: &RunTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace_rows(trace) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: io::Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    problem_id: &'a str,
    t_star: usize,
    #[serde(with = "crate::decimal::point")]
    returned_point: &'a crate::Point,
    objective: f64,
    envelope: Option<envelope::EnvelopeReport>,
    envelope_error: Option<String>,
}

fn sink(path: &Option<PathBuf>, fallback: Box<dyn Write>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => fallback,
    })
}

fn run_config(problem: &ProblemInstance, horizon: usize, seed: Option<u64>, lambda: Option<f64>, alpha: Option<f64>, mu: Option<f64>) -> SolverConfig {
    let mut config = SolverConfig::for_problem(problem, horizon, seed.unwrap_or(problem.defaults.seed));
    if let Some(l) = lambda {
        config.lambda = Some(l);
    }
    if let Some(a) = alpha {
        config.schedule = Schedule::ConstantAlpha { alpha: a };
    }
    if let Some(m) = mu {
        config.schedule = Schedule::StronglyConvexMu { mu: m };
    }
    config
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.into())
    }
}

/// An unknown id or unreadable config is a usage error.
fn load(problem: &str) -> std::result::Result<ProblemInstance, Failure> {
    problems::load(problem).map_err(|e| Failure::Usage(e.to_string()))
}

fn execute(command: Command) -> std::result::Result<bool, Failure> {
    match command {
        Command::Show { problem } => {
            println!("{}", load(&problem)?.to_json()?);
            Ok(true)
        }
        Command::Validate { problem, pairs } => {
            let p = load(&problem)?;
            let mut rng = ChaCha8Rng::seed_from_u64(p.defaults.seed);
            let report = problems::validate(&p, pairs, &mut rng);
            for c in &report.checks {
                println!("[{}] {:<26} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(report.pass())
        }
        Command::Run { problem, horizon, seed, lambda, alpha, mu, probes, out, report } => {
            let p = load(&problem)?;
            let mut config = run_config(&p, horizon, seed, lambda, alpha, mu);
            config.check_probes = probes;
            let trace = driver::run(&p, &config)?;
            write_trace_csv(&trace, sink(&out, Box::new(io::stdout()))?)?;
            let (envelope, envelope_error) =
                match envelope::stationarity(&p, &p.phi, &trace.returned_point, trace.lambda, &EnvelopeOptions::default()) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
            let ok = envelope.as_ref().is_none_or(|r| r.lower_bound_check.is_none_or(|b| b >= -1e-9));
            let summary = RunSummary {
                problem_id: &p.id,
                t_star: trace.t_star,
                returned_point: &trace.returned_point,
                objective: p.objective(&trace.returned_point),
                envelope,
                envelope_error,
            };
            let mut w = sink(&report, Box::new(io::stderr()))?;
            writeln!(w, "{}", serde_json::to_string_pretty(&summary)?)?;
            Ok(ok)
        }
        Command::Sweep { problem, horizons, seeds, lambda, alpha, mode, threads, csv, json, max_slope } => {
            let p = load(&problem)?;
            let opts = SweepOptions {
                horizons: horizons.unwrap_or_else(|| p.defaults.horizons.clone()),
                n_seeds: seeds.unwrap_or(p.defaults.seeds),
                base_seed: p.defaults.seed,
                mode: match mode {
                    Mode::Draw => TstarMode::Draw,
                    Mode::Full => TstarMode::Full,
                },
                threads,
                template: run_config(&p, 0, None, lambda, alpha, None),
            };
            let res = driver::sweep(&p, &opts)?;
            driver::write_csv(&res.rows, sink(&csv, Box::new(io::stdout()))?)?;
            let mut w = sink(&json, Box::new(io::stderr()))?;
            writeln!(w, "{}", serde_json::to_string(&res.fit)?)?;
            Ok(match (max_slope, res.fit.slope) {
                (Some(cap), Some(s)) => s <= cap,
                (Some(_), None) => res.fit.converged,
                (None, _) => true,
            })
        }
        Command::Oracle { problem, lo, hi, resolution } => {
            let p = load(&problem)?;
            let res = problems::brute_force_min(&p, (lo, hi), resolution)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
            // A recorded optimum is a lower bound the oracle may not beat.
            Ok(p.optimum.as_ref().is_none_or(|o| res.value >= o.f_star - 1e-9 * (1.0 + o.f_star.abs())))
        }
    }
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
