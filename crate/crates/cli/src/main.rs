//! Command-line driver: sample graphs, run the private estimator, audit
//! privacy, check the two-point lower bound, verify the inequality suite,
//! and run risk sweeps. Every run writes its outputs plus a manifest under
//! `--out`; exit codes are 0 success, 1 validation error, 2 audit or
//! verification failure, 3 runtime error.

mod config;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use config::*;
use privsbm_core::experiments::{lower_bound_overlay, run_risk_sweep, SweepConfig};
use privsbm_core::mechanism::{FallbackPolicy, MechanismConfig};
use privsbm_core::verify::{records_to_csv, records_to_junit_xml, SuiteOptions};
use privsbm_core::{
    audit_group_privacy, audit_restricted_dp, canonical_balanced, run_private_estimator,
    sample_sbm, two_point_exact, two_point_monte_carlo, DegreeEnvelope, Graph, Labeling,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "privsbm", version, about = "Node-private SBM community detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; all artifacts land here.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the seed recorded in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap the worker-thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Stderr verbosity: off, info, or debug.
    #[arg(long, global = true, default_value = "info")]
    log_level: LogLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, clap::ValueEnum)]
enum LogLevel {
    Off,
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one SBM graph and its truth labeling.
    Sample,
    /// Run the private estimator on an observed graph.
    Estimate,
    /// Exhaustive restricted-domain privacy audit.
    Audit,
    /// Two-point lower-bound experiment.
    LowerBound,
    /// Brute-force lemma verification suite.
    Verify,
    /// Monte-Carlo risk sweep with CSV reports.
    Sweep,
}

enum CliError {
    Validation(String),
    CheckFailed(String),
    Runtime(String),
}

impl From<privsbm_core::Error> for CliError {
    fn from(e: privsbm_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => {}
        Err(CliError::Validation(msg)) => {
            eprintln!("validation error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            std::process::exit(3);
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact_version: &'a str,
    command: &'a str,
    config_sha256: String,
    seed: u64,
    outputs: Vec<String>,
}

struct RunContext {
    out_dir: PathBuf,
    config_bytes: Vec<u8>,
    outputs: Vec<String>,
}

impl RunContext {
    fn new(cli: &Cli) -> Result<(Self, serde_json::Value), CliError> {
        let config_path = cli
            .config
            .as_ref()
            .ok_or_else(|| CliError::Validation("--config is required".into()))?;
        let config_bytes = fs::read(config_path)
            .map_err(|e| CliError::Validation(format!("cannot read config: {e}")))?;
        let value: serde_json::Value = serde_json::from_slice(&config_bytes)
            .map_err(|e| CliError::Validation(format!("config is not valid JSON: {e}")))?;
        fs::create_dir_all(&cli.out)?;
        Ok((
            RunContext {
                out_dir: cli.out.clone(),
                config_bytes,
                outputs: Vec::new(),
            },
            value,
        ))
    }

    fn parse<T: serde::de::DeserializeOwned>(&self, value: serde_json::Value) -> Result<T, CliError> {
        serde_json::from_value(value).map_err(|e| CliError::Validation(e.to_string()))
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::write(self.out_dir.join(name), contents)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(mut self, command: &str, seed: u64) -> Result<(), CliError> {
        let mut hasher = Sha256::new();
        hasher.update(&self.config_bytes);
        let digest = hasher.finalize();
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        let manifest = Manifest {
            artifact_version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256,
            seed,
            outputs: std::mem::take(&mut self.outputs),
        };
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        fs::write(self.out_dir.join("manifest.json"), text)?;
        Ok(())
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let (ctx, value) = RunContext::new(cli)?;
    let command = match cli.command {
        Command::Sample => "sample",
        Command::Estimate => "estimate",
        Command::Audit => "audit",
        Command::LowerBound => "lower-bound",
        Command::Verify => "verify",
        Command::Sweep => "sweep",
    };
    if cli.log_level >= LogLevel::Debug {
        eprintln!("[debug] {command}: out dir {}", cli.out.display());
    }
    let started = std::time::Instant::now();
    let result = match cli.command {
        Command::Sample => run_sample(cli, ctx, value),
        Command::Estimate => run_estimate(cli, ctx, value),
        Command::Audit => run_audit(cli, ctx, value),
        Command::LowerBound => run_lower_bound(cli, ctx, value),
        Command::Verify => run_verify(cli, ctx, value),
        Command::Sweep => run_sweep(cli, ctx, value),
    };
    if cli.log_level >= LogLevel::Info && result.is_ok() {
        eprintln!(
            "{command}: done in {:.2}s, outputs in {}",
            started.elapsed().as_secs_f64(),
            cli.out.display()
        );
    }
    result
}

fn run_sample(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: SampleConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let params = cfg.sbm.params().map_err(CliError::Validation)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let truth = match &cfg.truth {
        Some(labels) => Labeling::from_one_based(labels, params.k())
            .map_err(|e| CliError::Validation(e.to_string()))?,
        None => canonical_balanced(&params)?,
    };
    let graph = sample_sbm(&params, &truth, seed)?;
    ctx.write("graph.txt", &graph.to_text())?;
    ctx.write("truth.txt", &format!("{}\n", truth.to_text()))?;
    ctx.finish("sample", seed)
}

fn mechanism_from(
    epsilon: f64,
    envelope_c: f64,
    sampler: privsbm_core::mechanism::SamplerKind,
    chain_steps: usize,
    fallback: Option<FallbackPolicy>,
    lambda_w: Option<f64>,
    params: &privsbm_core::SbmParams,
) -> Result<MechanismConfig, CliError> {
    let envelope = DegreeEnvelope::new(envelope_c, params.a(), params.n());
    let mut cfg = MechanismConfig::new(epsilon, envelope, sampler)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    cfg.chain_steps = chain_steps;
    if let Some(policy) = fallback {
        cfg.fallback = policy;
    }
    cfg.lambda_w = lambda_w;
    Ok(cfg)
}

fn run_estimate(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: EstimateConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let params = cfg.sbm.params().map_err(CliError::Validation)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let text = fs::read_to_string(Path::new(&cfg.graph_path))
        .map_err(|e| CliError::Validation(format!("cannot read graph: {e}")))?;
    let graph = Graph::parse_text(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    if graph.n() != params.n() {
        return Err(CliError::Validation(format!(
            "graph has {} vertices, config says {}",
            graph.n(),
            params.n()
        )));
    }
    let mech = mechanism_from(
        cfg.epsilon,
        cfg.envelope_c,
        cfg.sampler,
        cfg.chain_steps,
        cfg.fallback,
        cfg.lambda_w,
        &params,
    )?;
    let run = run_private_estimator(&graph, &mech, &params, seed)?;
    ctx.write_json("estimate.json", &run.record)?;
    ctx.finish("estimate", seed)
}

#[derive(Serialize)]
struct AuditOutput {
    restricted: privsbm_core::AuditReport,
    group: Option<privsbm_core::GroupPrivacySummary>,
}

fn run_audit(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: AuditConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let params = cfg.sbm.params().map_err(CliError::Validation)?;
    let mut mech = mechanism_from(
        cfg.epsilon,
        cfg.envelope_c,
        privsbm_core::mechanism::SamplerKind::Exact,
        0,
        None,
        None,
        &params,
    )?;
    mech.chain_steps = 1;
    mech.eta_override = cfg.eta_override;
    let restricted = audit_restricted_dp(&params, &mech, cfg.n_cap, true)?;
    let group = if cfg.group {
        Some(audit_group_privacy(&params, &mech, cfg.n_cap, true)?)
    } else {
        None
    };
    let pass = restricted.pass && group.as_ref().is_none_or(|g| g.pass);
    let output = AuditOutput { restricted, group };
    ctx.write_json("audit.json", &output)?;
    ctx.finish("audit", cli.seed.unwrap_or(0))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "max log ratio {} exceeds epsilon0 {}",
            output.restricted.max_log_ratio, output.restricted.epsilon_claimed
        )))
    }
}

fn run_lower_bound(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: LowerBoundConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let params = cfg.sbm.params().map_err(CliError::Validation)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let mut reports = Vec::new();
    let mut all_pass = true;
    for &epsilon in &cfg.epsilons {
        let mech = mechanism_from(
            epsilon,
            cfg.envelope_c,
            privsbm_core::mechanism::SamplerKind::Exact,
            0,
            None,
            None,
            &params,
        )?;
        let report = match cfg.mode {
            LowerBoundMode::Exact => two_point_exact(&params, &mech, cfg.n_cap, true)?,
            LowerBoundMode::MonteCarlo => {
                two_point_monte_carlo(&params, &mech, cfg.replicates, seed)?
            }
        };
        all_pass &= report.pass;
        reports.push(report);
    }
    ctx.write_json("lower_bound.json", &reports)?;
    ctx.finish("lower-bound", seed)?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(
            "a two-point failure probability fell below its floor".into(),
        ))
    }
}

fn run_verify(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: VerifyConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let opts = SuiteOptions {
        suites: cfg
            .suites
            .unwrap_or_else(|| privsbm_core::verify::ALL_SUITES.to_vec()),
        lambda_override: cfg.lambda_override,
        seed,
    };
    let records = privsbm_core::run_lemma_suite(&opts)?;
    ctx.write("verify.csv", &records_to_csv(&records))?;
    ctx.write("verify.xml", &records_to_junit_xml(&records))?;
    ctx.finish("verify", seed)?;
    let failures = records.iter().filter(|r| !r.pass).count();
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "{failures} of {} lemma checks failed",
            records.len()
        )))
    }
}

fn run_sweep(cli: &Cli, mut ctx: RunContext, value: serde_json::Value) -> Result<(), CliError> {
    let cfg: SweepCommandConfig = ctx.parse(value)?;
    cfg.validate().map_err(CliError::Validation)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let sweep = SweepConfig {
        cells: cfg.expand_cells(),
        replicates: cfg.replicates,
        seed,
        truth_mode: cfg.truth_mode,
        constants: cfg.constants.unwrap_or_default(),
        lambda_w: cfg.lambda_w,
    };
    sweep.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    let report = run_risk_sweep(&sweep)?;
    let (overlay_csv, floors_ok) = lower_bound_overlay(&report);
    ctx.write("sweep.csv", &report.to_csv())?;
    ctx.write("overlay.csv", &overlay_csv)?;
    ctx.write_json("report.json", &report)?;
    ctx.finish("sweep", seed)?;
    if floors_ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed(
            "a sweep cell violated the minimax floor".into(),
        ))
    }
}
