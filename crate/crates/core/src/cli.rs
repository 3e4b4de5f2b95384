//! The `dfl` command line.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 invalid
//! configuration or input, 3 divergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{geometric_sum_ratio, kappa_order, kappa_psi, rate_fit, stability_probe, StabilityProbeConfig};
use crate::config::{Metric, RunConfig};
use crate::engine::{axis_override, rounds_to_threshold, sweep, threads_from_env, RoundRecord, Simulation};
use crate::error::{Error, Result};
use crate::output::{fmt_f64, load_records, to_json, write_json, write_records, RunSummary, SummaryFile, SWEEP_COLUMNS};
use crate::topology::{build_graph, metropolis_weights, sample_round_topology, validate};
use crate::verify::{run_all, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

const CONFIG_REFERENCE: &str = "\
Config files are JSON objects; unknown keys are rejected. Every key is optional.

  algorithm           dfedcata | dfedavg | dfedavgm | dpsgd | dfedsam    [dfedcata]
  m                   number of clients                                 [100]
  seed                master seed, non-zero                             [1]
  eval_every          record metrics every n rounds                     [1]
  verification_mode   check the round recursions while running          [false]
  record_timing       write wall-clock elapsed_ms (0 when false)        [true]
  init                {\"kind\": auto | zeros | normal, \"std\"}            [auto: zeros, MLP N(0, 0.01)]
  hyper.eta           learning rate                                     [0.1]
  hyper.lambda_       proximal penalty                                  [0.05]
  hyper.beta          extrapolation weight                              [0.99]
  hyper.K             local steps per round                             [5]
  hyper.T             communication rounds                              [100]
  hyper.rho           DFedSAM ascent radius                             [0.1]
  hyper.momentum      DFedAvgM momentum                                 [0.9]
  hyper.batch_size    minibatch size, null for full batch               [32]
  hyper.lr_decay      per-round decay of the exponential schedule       [0.998]
  hyper.lr_schedule   {\"kind\": exponential | inverse_sqrt |
                       inverse_iteration, \"mu_tilde\"}                   [exponential]
  topology            {\"kind\": random_dynamic, \"n_neighbors\"}          [random_dynamic, 10]
                      ring | grid | exponential | full
                      {\"kind\": watts_strogatz, \"k\", \"p_rewire\"}        [8, 0.02]
                      {\"kind\": erdos_renyi, \"p\"}                       [0.1]
  problem             {\"kind\": quadratic, \"d\", \"mu\", \"l\", \"spread\",
                       \"homogeneous\", \"identity\", \"noise_sigma\"}       [10, 0.5, 2, 1, false, false, 0]
                      {\"kind\": logistic, \"data\", \"noise_sigma\"}
                      {\"kind\": mlp, \"hidden\", \"data\", \"noise_sigma\"}  [hidden 32]
  problem.data        {\"source\", \"test_fraction\", \"partition\"}        [blobs, 0.2, dirichlet 0.3]
    source            {\"kind\": blobs, \"classes\", \"d_in\", \"n\", \"separation\"}  [10, 20, 4000, 3]
                      {\"kind\": csv, \"path\"}  (label in the last column)
    partition         {\"kind\": iid} | {\"kind\": dirichlet, \"alpha\"} |
                      {\"kind\": pathological, \"classes_per_client\"}
  sweep               {\"seeds\", \"metric\", \"threshold\"}                [[1,2,3,4,5], train_loss, 1e-3]
                      metric: train_loss | grad_norm_z_sq | test_accuracy

Overrides use dotted paths, e.g. --set hyper.beta=0.9 --set topology.kind=ring.
A run's summary.json is itself accepted as a config.
DFL_THREADS caps the number of worker threads.";

#[derive(Debug, Parser)]
#[command(name = "dfl", version, about = "Decentralized federated optimization simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write records.csv and summary.json.
    #[command(after_long_help = CONFIG_REFERENCE)]
    Run(RunArgs),
    /// Run a base config over values of one axis and every sweep seed.
    #[command(after_long_help = CONFIG_REFERENCE)]
    Sweep(SweepArgs),
    /// Gossip topology tools.
    Topology {
        #[command(subcommand)]
        command: TopologyCommand,
    },
    /// Run the built-in oracle suite.
    Verify(VerifyArgs),
    /// Stability probe, run-record analysis, or spectral constants.
    Analyze(AnalyzeArgs),
    /// Print the fully defaulted config.
    Defaults,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON config file.
    #[arg(short = 'c', long = "config")]
    pub config: PathBuf,
    /// Override a config value, `dotted.path=value` (value parsed as JSON when possible).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Output directory (created if missing).
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// beta, K, lambda_, m, topology, or eta.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<String>,
    /// Write per-run outputs and sweep.csv here; otherwise sweep.csv goes to stdout.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TopologyCommand {
    /// Print size, edge count, ψ, spectral gap, and κ_ψ as JSON.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Round to sample for time-varying topologies.
    #[arg(long, default_value_t = 0)]
    pub round: usize,
    /// Exponent used for κ_ψ.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Add this amount to one off-diagonal mixing weight (negative control).
    #[arg(long, allow_hyphen_values = true)]
    pub perturb_mixing: Option<f64>,
    /// Print results as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["stability", "records", "kappa"]))]
pub struct AnalyzeArgs {
    /// Twin-run stability probe on the config given with -c.
    #[arg(long, requires = "config")]
    pub stability: bool,
    /// Run CSV files to summarize.
    #[arg(long, num_args = 1..)]
    pub records: Vec<PathBuf>,
    /// Spectral constant for --psi and --alpha.
    #[arg(long, requires = "psi")]
    pub kappa: bool,

    /// JSON config file (stability mode).
    #[arg(short = 'c', long = "config")]
    pub config: Option<PathBuf>,
    /// Config override, `dotted.path=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Step constant of the decayed schedule η = μ̃/(tK+k+1).
    #[arg(long, default_value_t = 0.05)]
    pub mu_tilde: f64,
    /// Client whose sample is replaced.
    #[arg(long, default_value_t = 0)]
    pub perturbed_client: usize,
    /// Position of the replaced sample in that client's data.
    #[arg(long, default_value_t = 0)]
    pub perturbed_index: usize,
    /// Held-out samples used to measure the loss gap.
    #[arg(long, default_value_t = 512)]
    pub probe_size: usize,
    /// Probe horizon; defaults to hyper.T.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Replace the sample with an identical copy.
    #[arg(long)]
    pub identical: bool,

    /// Metric for rounds-to-threshold in record reports.
    #[arg(long, value_parser = parse_metric, default_value = "grad_norm_z_sq")]
    pub metric: Metric,
    /// Threshold for rounds-to-threshold; omitted means no count.
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Second-largest eigenvalue magnitude of the gossip matrix.
    #[arg(long)]
    pub psi: Option<f64>,
    /// Exponent of the spectral constant.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown metric '{s}', expected train_loss, grad_norm_z_sq, or test_accuracy"))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence { .. } => EXIT_DIVERGENCE,
        Error::Verification { .. } | Error::NoConvergence { .. } | Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    }
}

/// Entry point of the `dfl` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Topology {
            command: TopologyCommand::Inspect(a),
        } => cmd_inspect(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Defaults => crate::output::to_json(&RunConfig::default())
            .and_then(|text| write!(out, "{text}").map_err(Error::from))
            .map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))
}

fn write_run_files(dir: &Path, cfg: &RunConfig, records: &[RoundRecord], summary: RunSummary) -> Result<()> {
    write_records(std::fs::File::create(dir.join("records.csv"))?, records)?;
    write_json(
        &dir.join("summary.json"),
        &SummaryFile {
            resolved_config: cfg,
            summary,
        },
    )
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    threads_from_env()?;
    let cfg = RunConfig::load(&args.cfg.config, &args.cfg.set)?;
    output_dir(&args.out)?;
    let mut sim = Simulation::new(cfg.clone())?;
    let outcome = sim.run_to_end();
    let records = sim.records().to_vec();
    let rounds_completed = sim.round();
    let output = sim.into_output();
    let summary = RunSummary {
        status: match &outcome {
            Ok(()) => "ok",
            Err(Error::Divergence { .. }) => "diverged",
            Err(_) => "failed",
        },
        error: outcome.as_ref().err().map(ToString::to_string),
        rounds_completed,
        records: records.len(),
        psi: output.psi,
        disconnected_rounds: output.disconnected_rounds,
        final_record: records.last().cloned(),
        verification: output.verification.clone(),
    };
    write_run_files(&args.out, &cfg, &records, summary)?;
    outcome?;
    match records.last() {
        Some(r) => writeln!(
            out,
            "{} rounds, train_loss {}, grad_norm_z_sq {}, consensus {}",
            rounds_completed,
            fmt_f64(r.train_loss),
            fmt_f64(r.grad_norm_z_sq),
            fmt_f64(r.consensus)
        )?,
        None => writeln!(out, "{rounds_completed} rounds, no records")?,
    }
    Ok(EXIT_OK)
}

fn path_component(value: &str) -> String {
    value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let values: Vec<String> = args
        .values
        .iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    threads_from_env()?;
    let base = RunConfig::load(&args.cfg.config, &args.cfg.set)?;
    for v in &values {
        axis_override(&args.axis, v)?;
    }
    if let Some(dir) = &args.out {
        output_dir(dir)?;
    }
    let settings = base.sweep.clone().unwrap_or_default();
    let cells = sweep(&base, &args.axis, &values)?;

    let mut table = csv::Writer::from_writer(Vec::new());
    table.write_record(SWEEP_COLUMNS)?;
    let mut failures = 0;
    for cell in &cells {
        let row = match &cell.outcome {
            Ok(run) => {
                let rtt = rounds_to_threshold(&run.records, settings.metric, settings.threshold);
                let last = run.records.last().and_then(|r| r.metric(settings.metric));
                [
                    cell.axis_value.clone(),
                    cell.seed.to_string(),
                    rtt.map(|r| r.to_string()).unwrap_or_default(),
                    last.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(run.psi),
                    "ok".to_string(),
                ]
            }
            Err(msg) => {
                failures += 1;
                writeln!(err, "{}={} seed {}: {msg}", args.axis, cell.axis_value, cell.seed)?;
                [
                    cell.axis_value.clone(),
                    cell.seed.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    msg.clone(),
                ]
            }
        };
        table.write_record(&row)?;
        if let Some(dir) = &args.out {
            let run_dir = dir
                .join(format!("{}={}", args.axis, path_component(&cell.axis_value)))
                .join(format!("seed-{}", cell.seed));
            output_dir(&run_dir)?;
            let cfg = base.with_overrides(&[
                axis_override(&args.axis, &cell.axis_value)?,
                format!("seed={}", cell.seed),
            ])?;
            match &cell.outcome {
                Ok(run) => write_run_files(
                    &run_dir,
                    &cfg,
                    &run.records,
                    RunSummary {
                        status: "ok",
                        error: None,
                        rounds_completed: cfg.hyper.rounds,
                        records: run.records.len(),
                        psi: run.psi,
                        disconnected_rounds: run.disconnected_rounds,
                        final_record: run.records.last().cloned(),
                        verification: run.verification.clone(),
                    },
                )?,
                Err(msg) => std::fs::write(run_dir.join("error.txt"), format!("{msg}\n"))?,
            }
        }
    }
    let csv_bytes = table.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    match &args.out {
        Some(dir) => {
            std::fs::write(dir.join("sweep.csv"), &csv_bytes)?;
            writeln!(
                out,
                "{} runs ({} failed), metric {} threshold {}; wrote {}",
                cells.len(),
                failures,
                settings.metric.name(),
                fmt_f64(settings.threshold),
                dir.join("sweep.csv").display()
            )?;
        }
        None => out.write_all(&csv_bytes)?,
    }
    Ok(if failures > 0 { EXIT_FAILURE } else { EXIT_OK })
}

#[derive(Debug, Serialize)]
struct InspectReport {
    kind: &'static str,
    m: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    round: Option<usize>,
    edge_count: usize,
    connected: bool,
    psi: f64,
    spectral_gap: f64,
    alpha: f64,
    kappa_psi: Option<f64>,
    kappa_order: Option<f64>,
    validation: crate::topology::ValidationReport,
}

pub fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(&args.cfg.config, &args.cfg.set)?;
    let spec = cfg.topology_spec();
    let dynamic = spec.kind.is_dynamic();
    let w = if cfg.m == 1 {
        metropolis_weights(&crate::topology::Graph::from_edges(1, [])?)?
    } else if dynamic {
        sample_round_topology(&spec, args.round)?
    } else {
        metropolis_weights(&build_graph(&spec)?)?
    };
    let weights = w.weights();
    let m = weights.order();
    let edge_count = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .filter(|&(i, j)| weights.get(i, j) > 0.0)
        .count();
    let psi = w.psi();
    let report = InspectReport {
        kind: spec.kind.name(),
        m,
        seed: cfg.seed,
        round: dynamic.then_some(args.round),
        edge_count,
        connected: psi < 1.0 - 1e-9,
        psi,
        spectral_gap: w.spectral_gap(),
        alpha: args.alpha,
        kappa_psi: kappa_psi(psi, args.alpha).ok(),
        kappa_order: kappa_order(psi).ok(),
        validation: validate(&w),
    };
    out.write_all(to_json(&report)?.as_bytes())?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let results = run_all(&VerifyOptions {
        perturb_mixing: args.perturb_mixing,
    })?;
    if args.json {
        out.write_all(to_json(&results)?.as_bytes())?;
    } else {
        for r in &results {
            writeln!(
                out,
                "{} {:<40} max_deviation {} tolerance {} cases {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                fmt_f64(r.max_deviation),
                fmt_f64(r.tolerance),
                r.cases
            )?;
        }
    }
    Ok(if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

#[derive(Debug, Serialize)]
struct RecordsReport {
    path: String,
    records: usize,
    last_round: Option<usize>,
    final_record: Option<RoundRecord>,
    best_grad_norm_z_sq: Option<f64>,
    rate_fit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_fit_error: Option<String>,
    max_test_accuracy: Option<f64>,
    metric: &'static str,
    threshold: Option<f64>,
    rounds_to_threshold: Option<usize>,
}

#[derive(Debug, Serialize)]
struct KappaReport {
    psi: f64,
    alpha: f64,
    kappa_psi: f64,
    kappa_order: f64,
    bound_ratio_t10000: f64,
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    if args.stability {
        let path = args.config.as_ref().expect("clap requires --config");
        let cfg = RunConfig::load(path, &args.set)?;
        let probe = StabilityProbeConfig {
            mu_tilde: args.mu_tilde,
            perturbed_client: args.perturbed_client,
            perturbed_index: args.perturbed_index,
            probe_size: args.probe_size,
            rounds: args.rounds,
            identical: args.identical,
        };
        out.write_all(to_json(&stability_probe(&cfg, &probe)?)?.as_bytes())?;
    } else if args.kappa {
        let psi = args.psi.expect("clap requires --psi");
        let report = KappaReport {
            psi,
            alpha: args.alpha,
            kappa_psi: kappa_psi(psi, args.alpha)?,
            kappa_order: kappa_order(psi)?,
            bound_ratio_t10000: geometric_sum_ratio(psi, args.alpha, 10_000)?,
        };
        out.write_all(to_json(&report)?.as_bytes())?;
    } else {
        let mut reports = Vec::new();
        for path in &args.records {
            let records = load_records(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read records {}: {io}", path.display())),
                other => other,
            })?;
            let fit = rate_fit(&records);
            reports.push(RecordsReport {
                path: path.display().to_string(),
                records: records.len(),
                last_round: records.last().map(|r| r.round),
                final_record: records.last().cloned(),
                best_grad_norm_z_sq: records.iter().map(|r| r.grad_norm_z_sq).reduce(f64::min),
                rate_fit: fit.as_ref().ok().copied(),
                rate_fit_error: fit.err().map(|e| e.to_string()),
                max_test_accuracy: records.iter().filter_map(|r| r.test_accuracy).reduce(f64::max),
                metric: args.metric.name(),
                threshold: args.threshold,
                rounds_to_threshold: args
                    .threshold
                    .and_then(|th| rounds_to_threshold(&records, args.metric, th)),
            });
        }
        out.write_all(to_json(&reports)?.as_bytes())?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_by_error() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Divergence { round: 3, client: None }), EXIT_DIVERGENCE);
        assert_eq!(
            exit_code(&Error::Verification {
                check: "c",
                round: 0,
                deviation: 1.0,
                tolerance: 0.0
            }),
            EXIT_FAILURE
        );
    }

    #[test]
    fn help_lists_defaults() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(["dfl", "run", "--help"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("hyper.beta") && text.contains("[0.99]"), "{text}");
    }

    #[test]
    fn usage_error_is_config_exit() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_cli(["dfl", "run"], &mut out, &mut err), EXIT_CONFIG);
    }

    #[test]
    fn path_components_are_safe() {
        assert_eq!(path_component("{\"kind\":\"ring\"}"), "__kind___ring__");
        assert_eq!(path_component("0.9"), "0.9");
    }
}
