//! Seeded population generator with known echo-chamber dynamics.
//!
//! Items are drawn from a mixture of Gaussian topics. Every user has a home
//! topic, an interest breadth (the topics their exploratory exposure covers)
//! and a preference vector that drifts daily. Each day a user sees
//! `pvs_per_day` recommendation pages and wants one item from each. A
//! follower clicks that item inside the page with high probability, an
//! ignorer mostly reaches it through search instead; organic clicks come on
//! top, so both intents click equally often overall.
//!
//! Two mechanisms act on affected users:
//!
//! * reinforcement: every click pulls the preference vector by a fraction
//!   `reinforcement_rate` toward the mean of the items clicked so far;
//! * narrowing: the share of exploratory slots decays from 1 to
//!   `1 − narrowing_rate` over the simulated period, the rest of each page
//!   coming from the items nearest the current preference.
//!
//! With `paired_cohorts` users come in twins that share everything except
//! their click intent (home topic, breadth, drift, pages and clicked items),
//! which removes between-cohort population noise from null experiments.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::logmodel::{write_log, InteractionKind, InteractionRecord, LogFormat};
use crate::seed::derive_rng;

const DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Affected {
    #[default]
    Followers,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub dim: usize,
    pub n_days: usize,
    pub n_topics: usize,
    /// Standard deviation of topic centres per dimension.
    pub topic_spread: f64,
    /// Standard deviation of items around their topic centre.
    pub item_spread: f64,
    /// Initial preference noise around the home topic centre.
    pub preference_spread: f64,
    /// Daily random-walk step of the preference vector.
    pub drift: f64,
    pub reinforcement_rate: f64,
    pub narrowing_rate: f64,
    pub affected: Affected,
    pub follower_fraction: f64,
    pub paired_cohorts: bool,
    pub follower_click_rate: f64,
    pub ignorer_click_rate: f64,
    /// Expected clicks per user and day: one per page view plus organic ones.
    pub clicks_per_day: f64,
    pub pvs_per_day: usize,
    pub pv_size: usize,
    pub pool_size: usize,
    pub min_breadth: usize,
    pub temperature: f64,
    pub purchase_probability: f64,
    pub start_timestamp: i64,
    pub master_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_users: 200,
            n_items: 2000,
            dim: 8,
            n_days: 60,
            n_topics: 8,
            topic_spread: 3.0,
            item_spread: 0.8,
            preference_spread: 0.5,
            drift: 0.45,
            reinforcement_rate: 0.3,
            narrowing_rate: 0.5,
            affected: Affected::Followers,
            follower_fraction: 0.5,
            paired_cohorts: true,
            follower_click_rate: 0.9,
            ignorer_click_rate: 0.1,
            clicks_per_day: 8.0,
            pvs_per_day: 4,
            pv_size: 10,
            pool_size: 40,
            min_breadth: 2,
            temperature: 1.0,
            purchase_probability: 0.1,
            start_timestamp: 1_551_398_400,
            master_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_users < 2 || self.n_items < 2 {
            return fail(format!("need at least 2 users and 2 items, got {} and {}", self.n_users, self.n_items));
        }
        if self.dim == 0 || self.n_days < 2 || self.pvs_per_day == 0 || self.pv_size == 0 || self.pool_size == 0 {
            return fail("dim, pool_size, pvs_per_day and pv_size must be positive and n_days at least 2".into());
        }
        if self.n_topics == 0 || self.n_topics > self.n_items {
            return fail(format!("n_topics must lie in [1, n_items], got {}", self.n_topics));
        }
        if self.min_breadth == 0 || self.min_breadth > self.n_topics {
            return fail(format!("min_breadth must lie in [1, n_topics], got {}", self.min_breadth));
        }
        for (name, v) in [
            ("reinforcement_rate", self.reinforcement_rate),
            ("narrowing_rate", self.narrowing_rate),
            ("follower_fraction", self.follower_fraction),
            ("follower_click_rate", self.follower_click_rate),
            ("ignorer_click_rate", self.ignorer_click_rate),
            ("purchase_probability", self.purchase_probability),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, v) in [
            ("topic_spread", self.topic_spread),
            ("item_spread", self.item_spread),
            ("preference_spread", self.preference_spread),
            ("drift", self.drift),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return fail(format!("temperature must be positive, got {}", self.temperature));
        }
        if !self.clicks_per_day.is_finite() || self.clicks_per_day < self.pvs_per_day as f64 {
            return fail(format!(
                "clicks_per_day ({}) must cover one click per page view ({})",
                self.clicks_per_day, self.pvs_per_day
            ));
        }
        if self.paired_cohorts && (!self.n_users.is_multiple_of(2) || self.follower_fraction != 0.5) {
            return fail("paired_cohorts needs an even n_users and follower_fraction 0.5".into());
        }
        if self.start_timestamp <= 0 {
            return fail("start_timestamp must be positive".into());
        }
        Ok(())
    }

    fn exploration(&self, affected: bool, day: usize) -> f64 {
        if !affected {
            return 1.0;
        }
        (1.0 - self.narrowing_rate).powf(day as f64 / (self.n_days - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    Follower,
    Ignorer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTruth {
    pub user_id: String,
    pub intent: Intent,
    pub home_topic: usize,
    pub topics: Vec<usize>,
    /// Preference vector at the end of each simulated day.
    pub trajectory: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    pub users: Vec<UserTruth>,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub browse: Vec<InteractionRecord>,
    pub click: Vec<InteractionRecord>,
    pub purchase: Vec<InteractionRecord>,
    pub embeddings: EmbeddingTable,
    pub ground_truth: GroundTruth,
}

struct Catalog {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    prices: Vec<f64>,
    by_topic: Vec<Vec<usize>>,
}

fn build_catalog(cfg: &SynthConfig) -> Result<Catalog> {
    let mut rng = derive_rng(cfg.master_seed, "synth/catalog", 0);
    let topic_noise = Normal::new(0.0, cfg.topic_spread).map_err(|e| Error::Config(e.to_string()))?;
    let item_noise = Normal::new(0.0, cfg.item_spread).map_err(|e| Error::Config(e.to_string()))?;
    let price: LogNormal<f64> = LogNormal::new(3.0, 0.6).expect("valid log-normal");
    let centers: Vec<Vec<f64>> = (0..cfg.n_topics)
        .map(|_| (0..cfg.dim).map(|_| topic_noise.sample(&mut rng)).collect())
        .collect();
    let mut by_topic = vec![Vec::new(); cfg.n_topics];
    let mut vectors = Vec::with_capacity(cfg.n_items);
    let mut prices = Vec::with_capacity(cfg.n_items);
    for i in 0..cfg.n_items {
        // round-robin keeps every topic populated
        let t = i % cfg.n_topics;
        by_topic[t].push(i);
        vectors.push(centers[t].iter().map(|c| c + item_noise.sample(&mut rng)).collect());
        prices.push((price.sample(&mut rng) * 100.0).round() / 100.0);
    }
    let width = (cfg.n_items - 1).to_string().len();
    Ok(Catalog {
        ids: (0..cfg.n_items).map(|i| format!("i{i:0width$}")).collect(),
        vectors,
        prices,
        by_topic,
    })
}

fn centre(cat: &Catalog, topic: usize, dim: usize) -> Vec<f64> {
    let members = &cat.by_topic[topic];
    let mut c = vec![0.0; dim];
    for &i in members {
        for (a, x) in c.iter_mut().zip(&cat.vectors[i]) {
            *a += x;
        }
    }
    c.iter_mut().for_each(|a| *a /= members.len() as f64);
    c
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Items nearest to `p`, ties by index.
fn nearest_pool(cat: &Catalog, p: &[f64], size: usize) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = cat.vectors.iter().enumerate().map(|(i, v)| (sq_dist(p, v), i)).collect();
    let size = size.min(scored.len());
    scored.select_nth_unstable_by(size - 1, |a, b| a.partial_cmp(b).expect("finite distances"));
    scored.truncate(size);
    scored.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Softmax choice over candidates by negative squared distance to `p`.
fn choose(cat: &Catalog, p: &[f64], candidates: &[usize], temperature: f64, rng: &mut ChaCha8Rng) -> usize {
    let d: Vec<f64> = candidates.iter().map(|&i| sq_dist(p, &cat.vectors[i])).collect();
    let best = d.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = d.iter().map(|x| (-(x - best) / temperature).exp()).collect();
    let mut target = rng.random::<f64>() * w.iter().sum::<f64>();
    for (k, wk) in w.iter().enumerate() {
        if target < *wk {
            return k;
        }
        target -= wk;
    }
    candidates.len() - 1
}

struct Profile {
    home: usize,
    topics: Vec<usize>,
}

fn profile(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Profile {
    let breadth = rng.random_range(cfg.min_breadth..=cfg.n_topics);
    let mut topics: Vec<usize> = (0..cfg.n_topics).collect();
    topics.shuffle(rng);
    topics.truncate(breadth);
    let home = topics[0];
    topics.sort_unstable();
    Profile { home, topics }
}

/// Page generator for one user. Exploratory slots cycle through the user's
/// topics so every block sees them in equal measure.
struct Exposure<'a> {
    cat: &'a Catalog,
    topics: &'a [usize],
    slot: usize,
}

impl Exposure<'_> {
    /// The world stream is consumed identically whatever the user's state,
    /// so twins stay in lockstep.
    fn page(&mut self, size: usize, exploration: f64, pool: &[usize], world: &mut ChaCha8Rng) -> Vec<usize> {
        (0..size)
            .map(|_| {
                let topic = &self.cat.by_topic[self.topics[self.slot % self.topics.len()]];
                self.slot += 1;
                let u: f64 = world.random();
                let e = topic[world.random_range(0..topic.len())];
                let q = pool[world.random_range(0..pool.len())];
                if u < exploration {
                    e
                } else {
                    q
                }
            })
            .collect()
    }
}

struct UserLogs {
    browse: Vec<InteractionRecord>,
    click: Vec<InteractionRecord>,
    purchase: Vec<InteractionRecord>,
    truth: UserTruth,
}

/// Each displayed page yields one wanted item, clicked inside the page with
/// the intent's click rate and otherwise reached through search; organic
/// clicks come on top. Clicked items, their times and purchases come from
/// the world stream, so twins differ only in where clicks are attributed
/// until the dynamics separate them.
fn simulate_user(cfg: &SynthConfig, cat: &Catalog, user: usize, world_id: usize, intent: Intent) -> Result<UserLogs> {
    let master = cfg.master_seed;
    let mut world = derive_rng(master, "synth/world", world_id as u64);
    let mut own = derive_rng(master, "synth/user", user as u64);
    let prof = profile(cfg, &mut world);
    let mut exposure = Exposure {
        cat,
        topics: &prof.topics,
        slot: 0,
    };
    let width = (cfg.n_users - 1).to_string().len().max(4);
    let user_id = format!("u{user:0width$}");
    let affected = match cfg.affected {
        Affected::All => true,
        Affected::Followers => intent == Intent::Follower,
    };
    let click_rate = match intent {
        Intent::Follower => cfg.follower_click_rate,
        Intent::Ignorer => cfg.ignorer_click_rate,
    };
    let organic_mean = cfg.clicks_per_day - cfg.pvs_per_day as f64;
    let organic = (organic_mean > 0.0).then(|| Poisson::new(organic_mean).expect("positive mean"));
    let pref_noise = Normal::new(0.0, cfg.preference_spread).map_err(|e| Error::Config(e.to_string()))?;
    let drift = Normal::new(0.0, cfg.drift).map_err(|e| Error::Config(e.to_string()))?;

    let mut p: Vec<f64> = centre(cat, prof.home, cfg.dim)
        .into_iter()
        .map(|c| c + pref_noise.sample(&mut world))
        .collect();
    // running sum of clicked item vectors
    let mut anchor = vec![0.0; cfg.dim];
    let mut n_clicked = 0usize;
    let mut logs = UserLogs {
        browse: Vec::new(),
        click: Vec::new(),
        purchase: Vec::new(),
        truth: UserTruth {
            user_id: user_id.clone(),
            intent,
            home_topic: prof.home,
            topics: prof.topics.clone(),
            trajectory: Vec::with_capacity(cfg.n_days),
        },
    };

    for day in 0..cfg.n_days {
        let day_start = cfg.start_timestamp + day as i64 * DAY;
        let exploration = cfg.exploration(affected, day);
        let pool = nearest_pool(cat, &p, cfg.pool_size);
        let mut times: Vec<i64> = (0..cfg.pvs_per_day).map(|_| world.random_range(0..DAY - 3_600)).collect();
        times.sort_unstable();

        // (time, pv_id, item)
        let mut clicks: Vec<(i64, String, usize)> = Vec::new();
        for (slot, &t) in times.iter().enumerate() {
            let page = exposure.page(cfg.pv_size, exploration, &pool, &mut world);
            let wanted = choose(cat, &p, &page, cfg.temperature, &mut world);
            let pv_id = format!("pv-{user_id}-{day:03}-{slot}");
            let in_page = own.random::<f64>() < click_rate;
            for (pos, &item) in page.iter().enumerate() {
                logs.browse.push(InteractionRecord::browse(
                    day_start + t,
                    pv_id.clone(),
                    user_id.clone(),
                    cat.ids[item].clone(),
                    pos as u32,
                    in_page && pos == wanted,
                ));
            }
            let via = if in_page { pv_id } else { format!("s-{user_id}-{day:03}-p{slot}") };
            clicks.push((day_start + t + 10 + 3 * wanted as i64, via, page[wanted]));
        }
        let n_organic = organic.as_ref().map_or(0, |d| d.sample(&mut world) as usize);
        for s in 0..n_organic {
            let candidates = exposure.page(cfg.pv_size, exploration, &pool, &mut world);
            let pick = candidates[choose(cat, &p, &candidates, cfg.temperature, &mut world)];
            let t = world.random_range(0..DAY - 3_600);
            clicks.push((day_start + t, format!("s-{user_id}-{day:03}-{s}"), pick));
        }
        clicks.sort_by_key(|c| c.0);
        for (t, pv_id, item) in clicks {
            let v = &cat.vectors[item];
            n_clicked += 1;
            for (a, x) in anchor.iter_mut().zip(v) {
                *a += x;
            }
            if affected && cfg.reinforcement_rate > 0.0 {
                for (a, s) in p.iter_mut().zip(&anchor) {
                    *a += cfg.reinforcement_rate * (s / n_clicked as f64 - *a);
                }
            }
            let price = cat.prices[item];
            if world.random::<f64>() < cfg.purchase_probability {
                logs.purchase.push(InteractionRecord::transaction(
                    InteractionKind::Purchase,
                    t + 300,
                    pv_id.clone(),
                    user_id.clone(),
                    cat.ids[item].clone(),
                    price,
                ));
            }
            logs.click.push(InteractionRecord::transaction(
                InteractionKind::Click,
                t,
                pv_id,
                user_id.clone(),
                cat.ids[item].clone(),
                price,
            ));
        }
        for a in p.iter_mut() {
            *a += drift.sample(&mut world);
        }
        logs.truth.trajectory.push(p.clone());
    }
    Ok(logs)
}

/// Deterministic intent per user and the world stream each user follows.
fn assignments(cfg: &SynthConfig) -> Vec<(Intent, usize)> {
    let mut rng = derive_rng(cfg.master_seed, "synth/intent", 0);
    if cfg.paired_cohorts {
        let mut out = Vec::with_capacity(cfg.n_users);
        for pair in 0..cfg.n_users / 2 {
            let first_follows = rng.random::<bool>();
            for twin in [first_follows, !first_follows] {
                out.push((if twin { Intent::Follower } else { Intent::Ignorer }, pair));
            }
        }
        return out;
    }
    let n_follow = (cfg.follower_fraction * cfg.n_users as f64).round() as usize;
    let mut intents: Vec<Intent> = (0..cfg.n_users)
        .map(|u| if u < n_follow { Intent::Follower } else { Intent::Ignorer })
        .collect();
    intents.shuffle(&mut rng);
    intents.into_iter().enumerate().map(|(u, i)| (i, u)).collect()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let cat = build_catalog(cfg)?;
    let users = assignments(cfg)
        .into_par_iter()
        .enumerate()
        .map(|(u, (intent, world))| simulate_user(cfg, &cat, u, world, intent))
        .collect::<Result<Vec<_>>>()?;

    let mut browse = Vec::new();
    let mut click = Vec::new();
    let mut purchase = Vec::new();
    let mut truths = Vec::with_capacity(users.len());
    for u in users {
        browse.extend(u.browse);
        click.extend(u.click);
        purchase.extend(u.purchase);
        truths.push(u.truth);
    }
    for log in [&mut browse, &mut click, &mut purchase] {
        log.sort_by(|a, b| {
            (a.timestamp, &a.user_id, &a.pv_id, a.position).cmp(&(b.timestamp, &b.user_id, &b.pv_id, b.position))
        });
    }
    let mut embeddings = EmbeddingTable::new(cfg.dim)?;
    for (id, v) in cat.ids.iter().zip(&cat.vectors) {
        embeddings.insert(id.clone(), v)?;
    }
    Ok(SynthOutput {
        browse,
        click,
        purchase,
        embeddings,
        ground_truth: GroundTruth {
            config: cfg.clone(),
            users: truths,
        },
    })
}

/// Writes `browse.csv`, `click.csv`, `purchase.csv`, `embeddings.tsv` and
/// `ground_truth.json` into `dir`.
pub fn write_output(out: &SynthOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (kind, records) in [
        (InteractionKind::Browse, &out.browse),
        (InteractionKind::Click, &out.click),
        (InteractionKind::Purchase, &out.purchase),
    ] {
        let file = BufWriter::new(fs::File::create(dir.join(format!("{kind}.csv")))?);
        write_log(kind, records, LogFormat::Csv, file)?;
    }
    out.embeddings.write_tsv(BufWriter::new(fs::File::create(dir.join("embeddings.tsv"))?))?;
    serde_json::to_writer(BufWriter::new(fs::File::create(dir.join("ground_truth.json"))?), &out.ground_truth)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::mean_pairwise_distance;
    use crate::experiment::paired_t_test;
    use crate::logmodel::{group_page_views, parse_log, ParseOptions};

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_users: 40,
            n_items: 400,
            n_days: 20,
            master_seed: seed,
            ..Default::default()
        }
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            SynthConfig { n_users: 1, ..Default::default() },
            SynthConfig { narrowing_rate: 1.5, ..Default::default() },
            SynthConfig { temperature: 0.0, ..Default::default() },
            SynthConfig { n_users: 41, ..Default::default() },
            SynthConfig { clicks_per_day: 1.0, ..Default::default() },
        ] {
            assert!(matches!(generate(&bad), Err(Error::Config(_))));
        }
    }

    #[test]
    fn deterministic_and_canonically_ordered() {
        let a = generate(&small(3)).unwrap();
        let b = generate(&small(3)).unwrap();
        assert_eq!(a.click, b.click);
        assert_eq!(a.browse, b.browse);
        assert_eq!(a.ground_truth, b.ground_truth);
        for log in [&a.browse, &a.click, &a.purchase] {
            assert!(log.windows(2).all(|w| (w[0].timestamp, &w[0].user_id) <= (w[1].timestamp, &w[1].user_id)));
        }
        assert!(a.ground_truth.users.iter().all(|u| u.trajectory.len() == 20));
    }

    #[test]
    fn logs_round_trip_without_skips() {
        let out = generate(&small(4)).unwrap();
        for (kind, records) in [
            (InteractionKind::Browse, &out.browse),
            (InteractionKind::Click, &out.click),
            (InteractionKind::Purchase, &out.purchase),
        ] {
            let mut buf = Vec::new();
            write_log(kind, records, LogFormat::Csv, &mut buf).unwrap();
            let parsed = parse_log(kind, buf.as_slice(), LogFormat::Csv, ParseOptions::default()).unwrap();
            assert_eq!(parsed.skipped, 0);
            assert_eq!(parsed.records.len(), records.len());
        }
    }

    #[test]
    fn pvr_is_bimodal_by_intent() {
        let out = generate(&SynthConfig { n_users: 100, n_items: 1000, master_seed: 5, ..Default::default() }).unwrap();
        let pvs = group_page_views(&out.browse).unwrap();
        for u in &out.ground_truth.users {
            let views = &pvs[&u.user_id];
            let pvr = views.iter().filter(|v| v.is_clicked()).count() as f64 / views.len() as f64;
            match u.intent {
                Intent::Follower => assert!(pvr > 0.8, "{pvr}"),
                Intent::Ignorer => assert!(pvr < 0.2, "{pvr}"),
            }
        }
    }

    #[test]
    fn twins_share_pages_without_dynamics() {
        let cfg = SynthConfig { reinforcement_rate: 0.0, narrowing_rate: 0.0, ..small(6) };
        let out = generate(&cfg).unwrap();
        let items = |user: &str| -> Vec<&str> {
            out.browse.iter().filter(|r| r.user_id == user).map(|r| r.item_id.as_str()).collect()
        };
        assert_eq!(items("u0000"), items("u0001"));
        let clicks = |user: &str| -> Vec<(i64, &str)> {
            out.click.iter().filter(|r| r.user_id == user).map(|r| (r.timestamp, r.item_id.as_str())).collect()
        };
        assert_eq!(clicks("u0000"), clicks("u0001"));
        assert_eq!(out.ground_truth.users[0].trajectory, out.ground_truth.users[1].trajectory);
    }

    // Mean pairwise distance of the pages seen on the first and last day.
    fn day_diversity(out: &SynthOutput, user: &str, day: i64) -> f64 {
        let start = out.ground_truth.config.start_timestamp + day * DAY;
        let vectors: Vec<&[f64]> = out
            .browse
            .iter()
            .filter(|r| r.user_id == user && r.timestamp >= start && r.timestamp < start + DAY)
            .map(|r| out.embeddings.get(&r.item_id).unwrap())
            .collect();
        mean_pairwise_distance(&vectors).unwrap()
    }

    fn diversity_change(out: &SynthOutput, intent: Intent) -> (Vec<f64>, Vec<f64>) {
        let last = out.ground_truth.config.n_days as i64 - 1;
        out.ground_truth
            .users
            .iter()
            .filter(|u| u.intent == intent)
            .map(|u| (day_diversity(out, &u.user_id, 0), day_diversity(out, &u.user_id, last)))
            .unzip()
    }

    #[test]
    fn narrowing_shrinks_follower_exposure_only() {
        let out = generate(&SynthConfig { narrowing_rate: 0.5, ..small(7) }).unwrap();
        let (first, last) = diversity_change(&out, Intent::Follower);
        assert!(mean(&last) < mean(&first));
        let (first, last) = diversity_change(&out, Intent::Ignorer);
        assert!(paired_t_test(&first, &last).unwrap().p_value > 0.01);
    }

    #[test]
    fn stronger_narrowing_drops_diversity_more() {
        let drop = |gamma: f64| {
            (0..20)
                .map(|seed| {
                    let out = generate(&SynthConfig { narrowing_rate: gamma, ..small(200 + seed) }).unwrap();
                    let (first, last) = diversity_change(&out, Intent::Follower);
                    mean(&first) - mean(&last)
                })
                .sum::<f64>()
        };
        assert!(drop(0.8) > drop(0.4));
    }

    #[test]
    fn static_population_has_flat_exposure() {
        let mut passes = 0;
        for seed in 0..10 {
            let cfg = SynthConfig { reinforcement_rate: 0.0, narrowing_rate: 0.0, ..small(100 + seed) };
            let out = generate(&cfg).unwrap();
            let (first, last) = diversity_change(&out, Intent::Follower);
            passes += usize::from(paired_t_test(&first, &last).unwrap().p_value > 0.05);
        }
        assert!(passes >= 8, "{passes}/10");
    }

    #[test]
    fn reinforcement_contracts_trajectories() {
        // Spread of the end-to-start displacement across followers.
        let spread = |beta: f64| {
            let out = generate(&SynthConfig { reinforcement_rate: beta, narrowing_rate: 0.0, ..small(8) }).unwrap();
            let d: Vec<f64> = out
                .ground_truth
                .users
                .iter()
                .filter(|u| u.intent == Intent::Follower)
                .map(|u| sq_dist(u.trajectory.last().unwrap(), &u.trajectory[0]).sqrt())
                .collect();
            mean(&d)
        };
        assert!(spread(0.3) < spread(0.0));
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
