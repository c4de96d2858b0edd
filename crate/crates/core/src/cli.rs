//! Command-line front end: `ingest-check`, `cohort`, `synth`, `analyze` and
//! `report`. The binary only parses arguments and calls [`run`].

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::cohort::{compute_pvr, split, write_cohorts_csv, ThresholdMode};
use crate::error::{Error, Result, StageExt};
use crate::experiment::ExperimentReport;
use crate::logmodel::{group_page_views, InteractionKind, LogFormat};
use crate::pipeline::{analyze, load_inputs, load_log, with_threads, RunConfig};
use crate::render::{write_atomic, write_report};
use crate::synth::{generate, write_output, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "echo-audit", version, about = "Echo-chamber measurement for recommender interaction logs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse logs and the embedding table and print row counts.
    IngestCheck(IngestCheckArgs),
    /// Compute page-view ratios and write cohorts.csv.
    Cohort(CohortArgs),
    /// Generate a synthetic population with known dynamics.
    Synth(SynthArgs),
    /// Run the analysis campaigns and write the report.
    Analyze(AnalyzeArgs),
    /// Re-render report.md and the CSV tables from a report.json.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestCheckArgs {
    /// Run config naming all inputs.
    #[arg(long, conflicts_with = "log")]
    pub config: Option<PathBuf>,
    /// A single log file; needs --kind.
    #[arg(long, requires = "kind")]
    pub log: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<InteractionKind>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    pub format: LogFormat,
    /// Skip malformed rows instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    /// Run config; its browse log and thresholds are the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Browse log, overriding the config.
    #[arg(long)]
    pub browse: Option<PathBuf>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Read --lo and --hi as PVR quantiles.
    #[arg(long)]
    pub percentile: bool,
    /// Output directory for cohorts.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator settings; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides the config, defaults to `results`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "ECHO_AUDIT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A report.json written by `analyze`.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the directory of the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<InteractionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<LogFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IngestCheck(a) => ingest_check(a),
        Command::Cohort(a) => cohort(a),
        Command::Synth(a) => synth(a),
        Command::Analyze(a) => run_analyze(a),
        Command::Report(a) => report(a),
    }
}

fn ingest_check(a: IngestCheckArgs) -> Result<()> {
    if let (Some(path), Some(kind)) = (&a.log, a.kind) {
        let records = load_log(kind, path, a.format, a.lenient)?;
        println!("{kind}: {} rows", records.len());
        return Ok(());
    }
    let Some(path) = a.config else {
        return Err(Error::Argument("ingest-check needs --config or --log with --kind".into()));
    };
    let mut cfg = RunConfig::load(&path)?;
    cfg.lenient |= a.lenient;
    let inputs = load_inputs(&cfg)?;
    for kind in [InteractionKind::Browse, InteractionKind::Click, InteractionKind::Purchase] {
        println!("{kind}: {} rows", inputs.records(kind).len());
    }
    println!("embeddings: {} items, dimension {}", inputs.embeddings.len(), inputs.embeddings.dim());
    Ok(())
}

fn cohort(a: CohortArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(b) = a.browse {
        cfg.browse_log = b;
    }
    cfg.lo = a.lo.unwrap_or(cfg.lo);
    cfg.hi = a.hi.unwrap_or(cfg.hi);
    cfg.percentile |= a.percentile;
    let browse = load_log(InteractionKind::Browse, &cfg.browse_log, cfg.log_format, cfg.lenient)?;
    let views = group_page_views(&browse).stage("cohort")?;
    let table = compute_pvr(&views);
    let mode = if cfg.percentile { ThresholdMode::Percentile } else { ThresholdMode::Value };
    let assignment = split(&table, cfg.lo, cfg.hi, mode).stage("cohort")?;
    let mut bytes = Vec::new();
    write_cohorts_csv(&table, &assignment, &mut bytes)?;
    fs::create_dir_all(&a.out)?;
    write_atomic(&a.out.join("cohorts.csv"), &bytes)?;
    println!(
        "{} following, {} ignoring, {} unassigned, {} without page views",
        assignment.following.len(),
        assignment.ignoring.len(),
        assignment.unassigned.len(),
        table.excluded_users
    );
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg: SynthConfig = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.master_seed = seed;
    }
    let out = generate(&cfg)?;
    write_output(&out, &a.out)?;
    // A run config next to the logs; its relative paths resolve against it.
    let run = RunConfig {
        seed: cfg.master_seed,
        ..RunConfig::default()
    };
    let mut json = serde_json::to_vec_pretty(&run)?;
    json.push(b'\n');
    write_atomic(&a.out.join("run.json"), &json)?;
    println!(
        "{} users: {} browse, {} click, {} purchase rows in {}",
        cfg.n_users,
        out.browse.len(),
        out.click.len(),
        out.purchase.len(),
        a.out.display()
    );
    Ok(())
}

fn run_analyze(a: AnalyzeArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let out = a.out.or(cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
    cfg.output_dir = Some(out.clone());
    cfg.validate()?;
    let job = || -> Result<ExperimentReport> {
        let inputs = load_inputs(&cfg)?;
        analyze(&inputs, &cfg, |partial| write_report(partial, &out))
    };
    let report = match a.threads {
        Some(0) => return Err(Error::Config("thread count must be positive".into())),
        Some(n) => with_threads(n, job)??,
        None => job()?,
    };
    for line in &report.decisions {
        println!("{line}");
    }
    info!("report written to {}", out.display());
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let file = fs::File::open(&a.input)?;
    let report: ExperimentReport = serde_json::from_reader(BufReader::new(file))?;
    let out = match a.out {
        Some(o) => o,
        None => a.input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    write_report(&report, &out)
}

/// Runs the parsed command and maps failure to a nonzero exit code.
pub fn main_with(cli: Cli) -> std::process::ExitCode {
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn arguments_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn analyze_flags_parse() {
        let cli = Cli::try_parse_from(["echo-audit", "analyze", "--config", "run.json", "--seed", "42", "--out", "results/"]).unwrap();
        match cli.command {
            Command::Analyze(a) => {
                assert_eq!(a.seed, Some(42));
                assert_eq!(a.out, Some(PathBuf::from("results/")));
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["echo-audit", "ingest-check", "--log", "x.csv"]).is_err());
    }
}
