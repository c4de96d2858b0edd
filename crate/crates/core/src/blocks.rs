//! Fixed-size interaction blocks.
//!
//! A user's same-kind history is cut into consecutive runs of exactly `n`
//! events; an incomplete trailing run is dropped.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmodel::{InteractionKind, InteractionRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionBlock {
    pub user_id: String,
    pub kind: InteractionKind,
    pub index: usize,
    pub item_ids: Vec<String>,
    /// Timestamps of the first and last event in the block.
    pub span: (i64, i64),
}

/// Block length per interaction kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlockSizes {
    pub browse: usize,
    pub click: usize,
    pub purchase: usize,
}

impl Default for BlockSizes {
    fn default() -> Self {
        Self {
            browse: 200,
            click: 100,
            purchase: 10,
        }
    }
}

impl BlockSizes {
    pub fn get(&self, kind: InteractionKind) -> usize {
        match kind {
            InteractionKind::Browse => self.browse,
            InteractionKind::Click => self.click,
            InteractionKind::Purchase => self.purchase,
        }
    }
}

pub const DEFAULT_MIN_BLOCKS: usize = 3;

/// Cuts one user's time-sorted events into blocks of `n`.
pub fn build_blocks<R: Borrow<InteractionRecord>>(events: &[R], n: usize) -> Result<Vec<InteractionBlock>> {
    if n == 0 {
        return Err(Error::Argument("block size must be at least 1".into()));
    }
    let Some(first) = events.first().map(Borrow::borrow) else {
        return Ok(Vec::new());
    };
    for pair in events.windows(2) {
        let (a, b) = (pair[0].borrow(), pair[1].borrow());
        if b.user_id != first.user_id || b.kind != first.kind {
            return Err(Error::Argument(format!(
                "events mix user/kind ({}/{} and {}/{})",
                first.user_id, first.kind, b.user_id, b.kind
            )));
        }
        if b.timestamp < a.timestamp {
            return Err(Error::Ordering(format!(
                "events of user `{}` are not time-sorted ({} after {})",
                first.user_id, b.timestamp, a.timestamp
            )));
        }
    }

    Ok(events
        .chunks_exact(n)
        .enumerate()
        .map(|(index, chunk)| InteractionBlock {
            user_id: first.user_id.clone(),
            kind: first.kind,
            index,
            item_ids: chunk.iter().map(|e| e.borrow().item_id.clone()).collect(),
            span: (chunk[0].borrow().timestamp, chunk[n - 1].borrow().timestamp),
        })
        .collect())
}

/// Groups records of `kind` by user and sorts each history by time, keeping
/// file order among equal timestamps. Events before `trim_before` are dropped.
pub fn events_by_user(
    records: &[InteractionRecord],
    kind: InteractionKind,
    trim_before: Option<i64>,
) -> BTreeMap<&str, Vec<&InteractionRecord>> {
    let mut out: BTreeMap<&str, Vec<&InteractionRecord>> = BTreeMap::new();
    for r in records {
        if r.kind != kind || trim_before.is_some_and(|t| r.timestamp < t) {
            continue;
        }
        out.entry(r.user_id.as_str()).or_default().push(r);
    }
    for events in out.values_mut() {
        events.sort_by_key(|r| r.timestamp);
    }
    out
}

/// Blocks for every user with at least one complete block.
pub fn blocks_by_user(
    records: &[InteractionRecord],
    kind: InteractionKind,
    n: usize,
    trim_before: Option<i64>,
) -> Result<BTreeMap<String, Vec<InteractionBlock>>> {
    let mut out = BTreeMap::new();
    for (user, events) in events_by_user(records, kind, trim_before) {
        let blocks = build_blocks(&events, n)?;
        if !blocks.is_empty() {
            out.insert(user.to_owned(), blocks);
        }
    }
    Ok(out)
}

/// Users with at least `min_blocks` blocks.
pub fn filter_eligible(
    blocks: &BTreeMap<String, Vec<InteractionBlock>>,
    min_blocks: usize,
) -> Result<BTreeSet<String>> {
    if min_blocks < 2 {
        return Err(Error::Argument(format!(
            "min_blocks must be at least 2 so first and last blocks differ, got {min_blocks}"
        )));
    }
    Ok(blocks
        .iter()
        .filter(|(_, b)| b.len() >= min_blocks)
        .map(|(u, _)| u.clone())
        .collect())
}

/// Block summary CSV: `user_id,kind,index,size,first_ts,last_ts`.
pub fn write_block_summary<W: Write>(blocks: &BTreeMap<String, Vec<InteractionBlock>>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user_id", "kind", "index", "size", "first_ts", "last_ts"])?;
    for block in blocks.values().flatten() {
        w.write_record([
            block.user_id.as_str(),
            block.kind.as_str(),
            &block.index.to_string(),
            &block.item_ids.len().to_string(),
            &block.span.0.to_string(),
            &block.span.1.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
