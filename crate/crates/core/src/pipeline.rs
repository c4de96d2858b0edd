//! End-to-end analysis: ingest, cohorts, blocks, embeddings, K* selection,
//! the three campaigns, and the decision lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use crate::blocks::{blocks_by_user, filter_eligible, BlockSizes, InteractionBlock};
use crate::cluster::{BicVariant, ChWeighting, KSelection, PointSet};
use crate::cohort::{compute_pvr, split, CohortAssignment, ThresholdMode};
use crate::embed::{block_embedding, load_embedding_table, EmbeddingTable, MissingPolicy};
use crate::error::{Error, Result, StageExt};
use crate::experiment::{
    run_diversity, run_reinforcement, run_selection, run_tendency, BlockPair, CohortSummary, Cohorts, ExperimentReport,
    ReportHeader, SamplingPlan, UserDiversity,
};
use crate::logmodel::{group_page_views, parse_log, InteractionKind, InteractionRecord, LogFormat, ParseOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    Tendency,
    Reinforcement,
    Diversity,
}

/// Analysis settings. Relative paths are resolved against the directory of
/// the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub browse_log: PathBuf,
    pub click_log: PathBuf,
    pub purchase_log: PathBuf,
    pub embeddings: PathBuf,
    pub log_format: LogFormat,
    pub lenient: bool,
    pub block_browse: usize,
    pub block_click: usize,
    pub block_purchase: usize,
    pub lo: f64,
    pub hi: f64,
    pub percentile: bool,
    pub min_blocks: usize,
    /// Events before this timestamp are ignored when cutting blocks.
    pub trim_before: Option<i64>,
    pub repetitions: usize,
    pub p_fraction: f64,
    pub p_fraction_hopkins: f64,
    pub seed: u64,
    pub k_window: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// BIC curves averaged when choosing K*.
    pub selection_reps: usize,
    pub bic_variant: BicVariant,
    pub k_selection: KSelection,
    pub ch_weighting: ChWeighting,
    pub missing_items: MissingPolicy,
    /// Kinds whose user embeddings feed the tendency and reinforcement campaigns.
    pub kinds: Vec<InteractionKind>,
    pub campaigns: Vec<Campaign>,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sizes = BlockSizes::default();
        Self {
            browse_log: "browse.csv".into(),
            click_log: "click.csv".into(),
            purchase_log: "purchase.csv".into(),
            embeddings: "embeddings.tsv".into(),
            log_format: LogFormat::Csv,
            lenient: false,
            block_browse: sizes.browse,
            block_click: sizes.click,
            block_purchase: sizes.purchase,
            lo: 0.2,
            hi: 0.8,
            percentile: false,
            min_blocks: 3,
            trim_before: None,
            repetitions: 50,
            p_fraction: 0.8,
            p_fraction_hopkins: 0.1,
            seed: 0,
            k_window: 5,
            k_min: 2,
            k_max: 30,
            selection_reps: 10,
            bic_variant: BicVariant::XMeans,
            k_selection: KSelection::GlobalMax,
            ch_weighting: ChWeighting::Unweighted,
            missing_items: MissingPolicy::Error,
            kinds: vec![InteractionKind::Click, InteractionKind::Purchase],
            campaigns: vec![Campaign::Tendency, Campaign::Reinforcement, Campaign::Diversity],
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.browse_log, &mut self.click_log, &mut self.purchase_log, &mut self.embeddings] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(out) = self.output_dir.as_mut().filter(|p| p.is_relative()) {
            *out = base.join(&*out);
        }
    }

    pub fn block_sizes(&self) -> BlockSizes {
        BlockSizes {
            browse: self.block_browse,
            click: self.block_click,
            purchase: self.block_purchase,
        }
    }

    pub fn plan(&self) -> SamplingPlan {
        SamplingPlan {
            repetitions: self.repetitions,
            p_fraction_default: self.p_fraction,
            p_fraction_hopkins: self.p_fraction_hopkins,
            master_seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.plan().validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if self.block_browse < 2 || self.block_click == 0 || self.block_purchase == 0 {
            return bad("block sizes must be positive (browse at least 2)".into());
        }
        if !(0.0..=1.0).contains(&self.lo) || !(0.0..=1.0).contains(&self.hi) || self.lo >= self.hi {
            return bad(format!("thresholds must satisfy 0 <= lo < hi <= 1, got {} / {}", self.lo, self.hi));
        }
        if self.min_blocks < 2 {
            return bad(format!("min_blocks must be at least 2, got {}", self.min_blocks));
        }
        if self.k_min > self.k_max || self.k_max < 2 {
            return bad(format!("invalid k range [{}, {}]", self.k_min, self.k_max));
        }
        if self.selection_reps == 0 {
            return bad("selection_reps must be positive".into());
        }
        if self.kinds.contains(&InteractionKind::Browse) {
            return bad("browse blocks feed the diversity campaign only; use click or purchase in `kinds`".into());
        }
        Ok(())
    }

    fn has(&self, c: Campaign) -> bool {
        self.campaigns.contains(&c)
    }
}

/// Parsed logs and the item embedding table.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub browse: Vec<InteractionRecord>,
    pub click: Vec<InteractionRecord>,
    pub purchase: Vec<InteractionRecord>,
    pub embeddings: EmbeddingTable,
}

impl Inputs {
    pub fn records(&self, kind: InteractionKind) -> &[InteractionRecord] {
        match kind {
            InteractionKind::Browse => &self.browse,
            InteractionKind::Click => &self.click,
            InteractionKind::Purchase => &self.purchase,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_log(kind: InteractionKind, path: &Path, format: LogFormat, lenient: bool) -> Result<Vec<InteractionRecord>> {
    let parsed = open(path)
        .and_then(|r| parse_log(kind, r, format, ParseOptions { lenient }))
        .stage(&format!("ingest/{kind}"))?;
    if parsed.skipped > 0 {
        log::warn!("{}: skipped {} malformed rows", path.display(), parsed.skipped);
    }
    Ok(parsed.records)
}

/// Loads every input up front so that a missing file fails before any
/// table is written.
pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let embeddings = open(&cfg.embeddings).and_then(load_embedding_table).stage("embed/load")?;
    let load = |kind, path: &Path| load_log(kind, path, cfg.log_format, cfg.lenient);
    Ok(Inputs {
        browse: load(InteractionKind::Browse, &cfg.browse_log)?,
        click: load(InteractionKind::Click, &cfg.click_log)?,
        purchase: load(InteractionKind::Purchase, &cfg.purchase_log)?,
        embeddings,
    })
}

/// Cohorts from the browse log's page views.
pub fn assign_cohorts(browse: &[InteractionRecord], cfg: &RunConfig) -> Result<(CohortAssignment, usize)> {
    let views = group_page_views(browse)?;
    let table = compute_pvr(&views);
    let mode = if cfg.percentile { ThresholdMode::Percentile } else { ThresholdMode::Value };
    Ok((split(&table, cfg.lo, cfg.hi, mode)?, table.excluded_users))
}

/// Eligible users of each cohort with their first and last blocks.
fn cohort_blocks(
    inputs: &Inputs,
    kind: InteractionKind,
    cohorts: &CohortAssignment,
    cfg: &RunConfig,
) -> Result<Cohorts<Vec<(InteractionBlock, InteractionBlock)>>> {
    let blocks = blocks_by_user(inputs.records(kind), kind, cfg.block_sizes().get(kind), cfg.trim_before)?;
    let eligible = filter_eligible(&blocks, cfg.min_blocks)?;
    let pick = |members: &BTreeSet<String>| -> Vec<(InteractionBlock, InteractionBlock)> {
        members
            .iter()
            .filter(|u| eligible.contains(*u))
            .map(|u| {
                let b = &blocks[u];
                (b[0].clone(), b[b.len() - 1].clone())
            })
            .collect()
    };
    Ok(Cohorts {
        following: pick(&cohorts.following),
        ignoring: pick(&cohorts.ignoring),
    })
}

fn block_pair(blocks: &[(InteractionBlock, InteractionBlock)], table: &EmbeddingTable, policy: MissingPolicy) -> Result<BlockPair> {
    let mut ids = Vec::with_capacity(blocks.len());
    let mut first = Vec::with_capacity(blocks.len());
    let mut last = Vec::with_capacity(blocks.len());
    for (f, l) in blocks {
        ids.push(f.user_id.clone());
        first.push(block_embedding(f, table, policy)?.vector);
        last.push(block_embedding(l, table, policy)?.vector);
    }
    if ids.is_empty() {
        return Err(Error::Argument("cohort has no eligible users".into()));
    }
    BlockPair::new(
        PointSet::from_identified_rows(ids.clone(), &first)?,
        PointSet::from_identified_rows(ids, &last)?,
    )
}

pub fn header(cfg: &RunConfig) -> ReportHeader {
    let plan = cfg.plan();
    let mut notes = vec![format!(
        "p-samples take floor(p * n) users, e.g. {} of 2452 at p = {}",
        crate::experiment::p_size(2452, plan.p_fraction_default),
        plan.p_fraction_default
    )];
    notes.push("\"all\" Hopkins rows pool both resized cohorts before p-sampling".into());
    ReportHeader {
        master_seed: cfg.seed,
        repetitions: cfg.repetitions,
        p_fraction_default: cfg.p_fraction,
        p_fraction_hopkins: cfg.p_fraction_hopkins,
        k_window: cfg.k_window,
        bic_variant: cfg.bic_variant,
        k_selection: cfg.k_selection,
        ch_weighting: cfg.ch_weighting,
        notes,
    }
}

/// Runs every requested campaign, calling `flush` with the report so far
/// after each one.
pub fn analyze(
    inputs: &Inputs,
    cfg: &RunConfig,
    mut flush: impl FnMut(&ExperimentReport) -> Result<()>,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let plan = cfg.plan();
    let mut report = ExperimentReport::new(header(cfg));

    let (cohorts, excluded) = assign_cohorts(&inputs.browse, cfg).stage("cohort")?;
    info!(
        "cohorts: {} following, {} ignoring, {} unassigned",
        cohorts.following.len(),
        cohorts.ignoring.len(),
        cohorts.unassigned.len()
    );
    let mut summary = CohortSummary {
        thresholds: cohorts.thresholds,
        following: cohorts.following.len(),
        ignoring: cohorts.ignoring.len(),
        unassigned: cohorts.unassigned.len(),
        excluded,
        eligible: Vec::new(),
    };

    let mut embedded = BTreeMap::new();
    if cfg.has(Campaign::Tendency) || cfg.has(Campaign::Reinforcement) {
        for &kind in &cfg.kinds {
            let stage = format!("blocks/{kind}");
            let blocks = cohort_blocks(inputs, kind, &cohorts, cfg).stage(&stage)?;
            summary.eligible.push((kind.to_string(), blocks.following.len(), blocks.ignoring.len()));
            let pairs = blocks
                .try_map(|_, b| block_pair(b, &inputs.embeddings, cfg.missing_items))
                .stage(&format!("embed/{kind}"))?;
            embedded.insert(kind, pairs);
        }
    }
    let browse_blocks = if cfg.has(Campaign::Diversity) {
        let blocks = cohort_blocks(inputs, InteractionKind::Browse, &cohorts, cfg).stage("blocks/browse")?;
        summary.eligible.push(("browse".into(), blocks.following.len(), blocks.ignoring.len()));
        Some(blocks)
    } else {
        None
    };
    report.cohorts = Some(summary);
    flush(&report)?;

    if cfg.has(Campaign::Tendency) {
        for (&kind, data) in &embedded {
            info!("tendency ({kind})");
            report.tendency.push(run_tendency(kind, data, &plan).stage(&format!("tendency/{kind}"))?);
            flush(&report)?;
        }
    }
    if cfg.has(Campaign::Reinforcement) {
        for (&kind, data) in &embedded {
            info!("cluster-count selection ({kind})");
            let selection = run_selection(
                kind,
                data,
                cfg.k_min,
                cfg.k_max,
                cfg.selection_reps,
                cfg.seed,
                cfg.bic_variant,
                cfg.k_selection,
            )
            .stage(&format!("select_k/{kind}"))?;
            let k_star = Cohorts {
                following: selection.following.k_star,
                ignoring: selection.ignoring.k_star,
            };
            report.selection.push(selection);
            info!("reinforcement ({kind}), K* = {}/{}", k_star.following, k_star.ignoring);
            let section = run_reinforcement(kind, data, k_star, cfg.k_window, cfg.ch_weighting, &plan)
                .stage(&format!("reinforcement/{kind}"))?;
            report.reinforcement.push(section);
            report.decisions = decisions(&report);
            flush(&report)?;
        }
    }
    if let Some(blocks) = browse_blocks {
        info!("diversity");
        let data = blocks
            .try_map(|_, b| UserDiversity::from_blocks(b.iter().map(|(f, l)| (f, l)), &inputs.embeddings, cfg.missing_items))
            .stage("diversity")?;
        report.diversity = Some(run_diversity(&data, &plan).stage("diversity")?);
    }
    report.decisions = decisions(&report);
    flush(&report)?;
    Ok(report)
}

/// Decision lines. Reinforcement is detected for a kind when, averaged over
/// the k window, the following cohort's CH drop is smaller and its ARI
/// larger than the ignoring cohort's, both at p < 0.05. Narrowing is
/// detected for a cohort whose browse diversity falls from first to last
/// block at p < 0.05.
pub fn decisions(report: &ExperimentReport) -> Vec<String> {
    const ALPHA: f64 = 0.05;
    let mut lines = Vec::new();
    for s in &report.reinforcement {
        let ch = &s.ch_drop.ave;
        let ari = &s.ari.ave;
        let detected = ch.following < ch.ignoring && ch.p_value < ALPHA && ari.following > ari.ignoring && ari.p_value < ALPHA;
        let verdict = if detected { "detected" } else { "not detected" };
        lines.push(format!("reinforcement: {verdict} ({})", s.kind));
    }
    if let Some(d) = &report.diversity {
        for row in &d.rows {
            let detected = row.last < row.first && row.p_value < ALPHA;
            let verdict = if detected { "detected" } else { "not detected" };
            lines.push(format!("content narrowing: {verdict} ({})", row.group));
        }
    }
    lines
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
