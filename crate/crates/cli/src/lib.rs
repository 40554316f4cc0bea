//! Command-line front end: `list`, `run` and `audit`.
//!
//! Trial `i` of a run with master seed `m` uses the construction seed
//! `derive_seed(m, i)` and measures with `stream(derive_seed(m, i), 1)`, so
//! any single trial can be replayed from the report.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use simonforge::attacks::{
    constant_control_audit, epsilon_audit, run_attack, AttackError, AttackKind, AttackReport,
    AttackSpec, EpsilonAudit, DEFAULT_C, DEFAULT_SLIDE_ROUNDS,
};
use simonforge::constructions::{FeistelMode, HashKind};
use simonforge::primitives::CipherKind;
use simonforge::rng::{derive_seed, stream};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("attack failed: {0}")]
    Attack(AttackError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::UnknownAttack(_)
            | AttackError::Width { .. }
            | AttackError::Parameters(_)
            | AttackError::NoNullModel(_) => CliError::Usage(e.to_string()),
            other => CliError::Attack(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "simonforge", version, about = "Simulated superposition attacks on toy-width symmetric constructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the attack catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run seeded attack trials and report success against the bound.
    Run(RunArgs),
    /// Measure ε(f, s) of the Simon function over seeded instances.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CipherArg {
    RandomPerm,
    ToySpn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HashArg {
    Xex,
    Gray,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoundsArg {
    Permutation,
    Function,
}

#[derive(Clone, Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub attack: String,
    /// Block width n (half width for feistel3).
    #[arg(long)]
    pub width: u32,
    /// Master seed.
    #[arg(long, env = "SIMONFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u32,
    #[arg(long, value_enum, default_value = "random-perm")]
    pub cipher: CipherArg,
    /// Offset hash for lrw.
    #[arg(long, value_enum, default_value = "xex")]
    pub hash: HashArg,
    /// Round functions for feistel3.
    #[arg(long, value_enum, default_value = "permutation")]
    pub rounds: RoundsArg,
    #[arg(long, default_value_t = DEFAULT_SLIDE_ROUNDS)]
    pub slide_rounds: u32,
    /// Attack a structureless ideal primitive instead (feistel3, lrw).
    #[arg(long)]
    pub null_model: bool,
    /// Write the JSON document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON document instead of a summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Subroutine steps per Simon-domain bit.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    /// Record wall-clock timings (makes the document run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Also audit a constant function of the same width.
    #[arg(long)]
    pub control: bool,
}

/// Everything that determines a run document.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub attack: AttackKind,
    pub width: u32,
    pub seed: u64,
    pub trials: u32,
    pub c: f64,
    pub cipher: CipherKind,
    pub hash: HashKind,
    pub feistel_mode: FeistelMode,
    pub slide_rounds: u32,
    pub null_model: bool,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(attack: AttackKind, width: u32, seed: u64, trials: u32) -> Self {
        Self {
            attack,
            width,
            seed,
            trials,
            c: DEFAULT_C,
            cipher: CipherKind::RandomPerm,
            hash: HashKind::Xex,
            feistel_mode: FeistelMode::PermutationRounds,
            slide_rounds: DEFAULT_SLIDE_ROUNDS,
            null_model: false,
            timings: false,
        }
    }

    fn from_args(a: &SpecArgs, c: f64, timings: bool) -> Result<Self, CliError> {
        let attack: AttackKind = a.attack.parse()?;
        if a.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let cfg = Self {
            attack,
            width: a.width,
            seed: a.seed,
            trials: a.trials,
            c,
            cipher: match a.cipher {
                CipherArg::RandomPerm => CipherKind::RandomPerm,
                CipherArg::ToySpn => CipherKind::ToySpn,
            },
            hash: match a.hash {
                HashArg::Xex => HashKind::Xex,
                HashArg::Gray => HashKind::Gray,
            },
            feistel_mode: match a.rounds {
                RoundsArg::Permutation => FeistelMode::PermutationRounds,
                RoundsArg::Function => FeistelMode::FunctionRounds,
            },
            slide_rounds: a.slide_rounds,
            null_model: a.null_model,
            timings,
        };
        cfg.spec_for(0).validate()?;
        Ok(cfg)
    }

    pub fn trial_seed(&self, trial: u32) -> u64 {
        derive_seed(self.seed, trial as u64)
    }

    pub fn spec_for(&self, trial: u32) -> AttackSpec {
        let mut spec = AttackSpec::new(self.attack, self.width, self.trial_seed(trial));
        spec.c = self.c;
        spec.cipher = self.cipher;
        spec.hash = self.hash;
        spec.feistel_mode = self.feistel_mode;
        spec.slide_rounds = self.slide_rounds;
        spec.null_model = self.null_model;
        spec
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recovered {
    pub label: String,
    pub value: u32,
}

/// One trial as it appears in the report document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: u32,
    pub seed: u64,
    pub success: bool,
    pub failure: Option<String>,
    pub period: Option<u32>,
    pub recovered: Vec<Recovered>,
    pub kernel_dimension: u32,
    pub subroutine_steps: u64,
    pub superposition_queries: u64,
    pub verification_queries: u64,
    pub classical_queries: u64,
    pub total_queries: u64,
    pub forgeries: u64,
    pub forgeries_verified: u64,
    pub forgery_shortfall: Option<String>,
}

impl TrialSummary {
    fn from_report(trial: u32, r: &AttackReport) -> Self {
        Self {
            trial,
            seed: r.spec.seed,
            success: r.success,
            failure: r.failure.clone(),
            period: r.period.map(|p| p.value()),
            recovered: r
                .recovered
                .iter()
                .map(|v| Recovered {
                    label: v.label.clone(),
                    value: v.value.value(),
                })
                .collect(),
            kernel_dimension: r.kernel_dimension,
            subroutine_steps: r.subroutine_steps,
            superposition_queries: r.superposition_queries,
            verification_queries: r.verification_queries,
            classical_queries: r.classical_queries,
            total_queries: r.total_queries,
            forgeries: r.forgeries.len() as u64,
            forgeries_verified: r.verified_forgeries() as u64,
            forgery_shortfall: r.forgery_shortfall.clone(),
        }
    }

    fn errored(trial: u32, seed: u64, err: &AttackError) -> Self {
        Self {
            trial,
            seed,
            success: false,
            failure: Some(format!("error: {err}")),
            period: None,
            recovered: Vec::new(),
            kernel_dimension: 0,
            subroutine_steps: 0,
            superposition_queries: 0,
            verification_queries: 0,
            classical_queries: 0,
            total_queries: 0,
            forgeries: 0,
            forgeries_verified: 0,
            forgery_shortfall: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub success_rate: f64,
    pub bound: f64,
    pub queries_total: u64,
    pub forgeries_total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total: f64,
    pub per_trial: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub attack: String,
    pub width: u32,
    pub seed: u64,
    pub trials: u32,
    pub c: f64,
    pub null_model: bool,
    pub per_trial: Vec<TrialSummary>,
    pub aggregate: Aggregate,
    /// Null unless timings were requested, which keeps documents
    /// byte-identical across runs.
    pub timings_ms: Option<Timings>,
}

/// Three binomial standard deviations around `bound` over `trials`.
pub fn margin(bound: f64, trials: u32) -> f64 {
    let p = bound.clamp(0.0, 1.0);
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

impl ReportDocument {
    pub fn threshold(&self) -> f64 {
        self.aggregate.bound - margin(self.aggregate.bound, self.trials)
    }

    pub fn passed(&self) -> bool {
        self.per_trial.iter().all(|t| !t.failure_is_error()) && self.aggregate.success_rate >= self.threshold()
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl TrialSummary {
    fn failure_is_error(&self) -> bool {
        self.failure.as_deref().is_some_and(|f| f.starts_with("error: "))
    }
}

/// Runs every trial of `cfg`; trials run in parallel and are reported in
/// index order.
pub fn run_trials(cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let base = cfg.spec_for(0);
    base.validate()?;
    let start = Instant::now();
    let results: Vec<(TrialSummary, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let t0 = Instant::now();
            let spec = cfg.spec_for(i);
            let mut rng = stream(spec.seed, 1);
            let summary = match run_attack(&spec, &mut rng) {
                Ok(r) => TrialSummary::from_report(i, &r),
                Err(e) => TrialSummary::errored(i, spec.seed, &e),
            };
            (summary, t0.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let successes = results.iter().filter(|(t, _)| t.success).count();
    let aggregate = Aggregate {
        success_rate: successes as f64 / cfg.trials as f64,
        bound: base.theoretical_bound(),
        queries_total: results.iter().map(|(t, _)| t.total_queries).sum(),
        forgeries_total: results.iter().map(|(t, _)| t.forgeries).sum(),
    };
    let timings_ms = cfg.timings.then(|| Timings {
        total: total_ms,
        per_trial: results.iter().map(|(_, ms)| *ms).collect(),
    });
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION.into(),
        attack: cfg.attack.name().into(),
        width: cfg.width,
        seed: cfg.seed,
        trials: cfg.trials,
        c: cfg.c,
        null_model: cfg.null_model,
        per_trial: results.into_iter().map(|(t, _)| t).collect(),
        aggregate,
        timings_ms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditTrial {
    pub trial: u32,
    pub seed: u64,
    pub epsilon: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditDocument {
    pub schema_version: String,
    pub attack: String,
    pub width: u32,
    pub seed: u64,
    pub trials: u32,
    pub per_trial: Vec<AuditTrial>,
    pub fraction_within: f64,
    pub epsilon_min: f64,
    pub epsilon_median: f64,
    pub epsilon_max: f64,
    pub control: Option<EpsilonAudit>,
}

impl AuditDocument {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn run_audit(cfg: &RunConfig, control: bool) -> Result<AuditDocument, CliError> {
    cfg.spec_for(0).validate()?;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let spec = cfg.spec_for(i);
            epsilon_audit(&spec).map(|a| AuditTrial {
                trial: i,
                seed: spec.seed,
                epsilon: a.epsilon,
                within_bound: a.within_bound,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut eps: Vec<f64> = per_trial.iter().map(|t| t.epsilon).collect();
    eps.sort_by(f64::total_cmp);
    let within = per_trial.iter().filter(|t| t.within_bound).count();
    let control = if control {
        Some(constant_control_audit(cfg.spec_for(0).simon_width())?)
    } else {
        None
    };
    Ok(AuditDocument {
        schema_version: SCHEMA_VERSION.into(),
        attack: cfg.attack.name().into(),
        width: cfg.width,
        seed: cfg.seed,
        trials: cfg.trials,
        fraction_within: within as f64 / cfg.trials as f64,
        epsilon_min: eps[0],
        epsilon_median: eps[eps.len() / 2],
        epsilon_max: eps[eps.len() - 1],
        per_trial,
        control,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub target: String,
    pub technique: String,
    pub min_width: u32,
    pub max_width: u32,
    pub selector_bit: bool,
    pub nonce_randomized: bool,
    pub forges: bool,
    pub null_model: bool,
    pub default_c: f64,
}

pub fn catalog() -> Vec<CatalogEntry> {
    AttackKind::ALL
        .into_iter()
        .map(|k| {
            let (min_width, max_width) = k.width_range();
            CatalogEntry {
                name: k.name().into(),
                target: k.target().into(),
                technique: k.technique().into(),
                min_width,
                max_width,
                selector_bit: k.has_selector(),
                nonce_randomized: k.nonce_randomized(),
                forges: k.forges(),
                null_model: k.supports_null_model(),
                default_c: DEFAULT_C,
            }
        })
        .collect()
}

fn write_out(path: &Option<PathBuf>, json: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, json)?;
    }
    Ok(())
}

fn cmd_list(json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let entries = catalog();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&entries)?)?;
    } else {
        for e in &entries {
            let defaults = if e.null_model { ", null model" } else { "" };
            writeln!(
                out,
                "{:<13} widths {:>2}..={:<2} c={}{}  {}",
                e.name, e.min_width, e.max_width, e.default_c, defaults, e.target
            )?;
            writeln!(out, "{:13} {}", "", e.technique)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = RunConfig::from_args(&args.spec, args.c, args.timings)?;
    let doc = run_trials(&cfg)?;
    let json = doc.to_json()?;
    let errored = doc.per_trial.iter().filter(|t| t.failure_is_error()).count();
    if args.spec.json {
        out.write_all(json.as_bytes())?;
    } else {
        let wins = doc.per_trial.iter().filter(|t| t.success).count();
        writeln!(
            out,
            "{} width {} seed {}: {}/{} succeeded ({:.4}), bound {:.6}, threshold {:.6}",
            doc.attack,
            doc.width,
            doc.seed,
            wins,
            doc.trials,
            doc.aggregate.success_rate,
            doc.aggregate.bound,
            doc.threshold()
        )?;
        writeln!(
            out,
            "queries {} total, forgeries {} total",
            doc.aggregate.queries_total, doc.aggregate.forgeries_total
        )?;
        if errored > 0 {
            writeln!(out, "{errored} trials hit runtime errors")?;
        }
        writeln!(out, "{}", if doc.passed() { "PASS" } else { "FAIL" })?;
    }
    write_out(&args.spec.out, &json)?;
    Ok(if doc.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_audit(args: &AuditArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = RunConfig::from_args(&args.spec, DEFAULT_C, false)?;
    let doc = run_audit(&cfg, args.control)?;
    let json = doc.to_json()?;
    if args.spec.json {
        out.write_all(json.as_bytes())?;
    } else {
        writeln!(
            out,
            "{} width {} seed {}: eps <= 1/2 in {}/{} ({:.4}); min {:.6} median {:.6} max {:.6}",
            doc.attack,
            doc.width,
            doc.seed,
            doc.per_trial.iter().filter(|t| t.within_bound).count(),
            doc.trials,
            doc.fraction_within,
            doc.epsilon_min,
            doc.epsilon_median,
            doc.epsilon_max
        )?;
        if let Some(c) = &doc.control {
            writeln!(
                out,
                "control ({} bits, constant): eps {} within bound {}",
                c.simon_width, c.epsilon, c.within_bound
            )?;
        }
    }
    write_out(&args.spec.out, &json)?;
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::List { json } => cmd_list(*json, out),
        Command::Run(args) => cmd_run(args, out),
        Command::Audit(args) => cmd_audit(args, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "simonforge: {e}");
            e.exit_code()
        }
    }
}
