//! Item embedding table and average-pooled block embeddings.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blocks::InteractionBlock;
use crate::error::{Error, Result};
use crate::logmodel::InteractionKind;

/// Item id → D-dimensional vector, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("embedding dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            ids: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        })
    }

    pub fn insert(&mut self, item_id: impl Into<String>, vector: &[f64]) -> Result<()> {
        let item_id = item_id.into();
        if vector.len() != self.dim {
            return Err(Error::Argument(format!(
                "vector for `{item_id}` has {} values, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        if let Some(v) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("vector for `{item_id}` has non-finite value {v}")));
        }
        if self.index.contains_key(&item_id) {
            return Err(Error::Integrity(format!("duplicate item id `{item_id}`")));
        }
        self.index.insert(item_id.clone(), self.ids.len());
        self.ids.push(item_id);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, item_id: &str) -> Option<&[f64]> {
        self.index
            .get(item_id)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Items in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids
            .iter()
            .zip(self.data.chunks_exact(self.dim))
            .map(|(id, v)| (id.as_str(), v))
    }

    /// Header-less TSV: `item_id<TAB>v1<TAB>...<TAB>vD`.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut table: Option<Self> = None;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or_default();
            if id.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty item id".into(),
                });
            }
            let values = fields
                .map(|f| {
                    f64::from_str(f.trim()).map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("invalid number `{f}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let table = match &mut table {
                Some(t) => t,
                None => table.insert(Self::new(values.len()).map_err(|_| Error::Parse {
                    line: line_no,
                    message: "row has no values".into(),
                })?),
            };
            if values.len() != table.dim {
                return Err(Error::Dimension {
                    line: line_no,
                    expected: table.dim,
                    found: values.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: "non-finite value".into(),
                });
            }
            if table.index.contains_key(id) {
                return Err(Error::Integrity(format!("line {line_no}: duplicate item id `{id}`")));
            }
            table.insert(id, &values)?;
        }
        table.ok_or_else(|| Error::Parse {
            line: 0,
            message: "embedding table is empty".into(),
        })
    }

    pub fn write_tsv<W: Write>(&self, mut writer: W) -> Result<()> {
        for (id, v) in self.iter() {
            write!(writer, "{id}")?;
            for x in v {
                write!(writer, "\t{x}")?;
            }
            writeln!(writer)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Loads an embedding table from a TSV stream.
pub fn load_embedding_table<R: BufRead>(reader: R) -> Result<EmbeddingTable> {
    EmbeddingTable::load(reader)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    #[default]
    Error,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserBlockEmbedding {
    pub user_id: String,
    pub kind: InteractionKind,
    pub block_index: usize,
    pub vector: Vec<f64>,
}

/// Neumaier-compensated running sums, one per component.
pub(crate) struct CompensatedSum {
    sum: Vec<f64>,
    carry: Vec<f64>,
}

impl CompensatedSum {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            carry: vec![0.0; dim],
        }
    }

    pub(crate) fn add(&mut self, v: &[f64]) {
        for ((s, c), &x) in self.sum.iter_mut().zip(&mut self.carry).zip(v) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }

    pub(crate) fn mean(&self, count: usize) -> Vec<f64> {
        let n = count as f64;
        self.sum.iter().zip(&self.carry).map(|(s, c)| (s + c) / n).collect()
    }
}

/// Component-wise mean of the embeddings of the block's items.
pub fn block_embedding(
    block: &InteractionBlock,
    table: &EmbeddingTable,
    policy: MissingPolicy,
) -> Result<UserBlockEmbedding> {
    if block.item_ids.is_empty() {
        return Err(Error::EmptyBlock {
            user_id: block.user_id.clone(),
            block_index: block.index,
        });
    }
    let dim = table.dim();
    let mut acc = CompensatedSum::new(dim);
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    let mut resolved = 0usize;
    for id in &block.item_ids {
        match table.get(id) {
            Some(v) => {
                acc.add(v);
                for ((l, h), &x) in lo.iter_mut().zip(&mut hi).zip(v) {
                    *l = l.min(x);
                    *h = h.max(x);
                }
                resolved += 1;
            }
            None if policy == MissingPolicy::Skip => {}
            None => return Err(Error::UnknownItem(id.clone())),
        }
    }
    if resolved == 0 {
        return Err(Error::EmptyBlock {
            user_id: block.user_id.clone(),
            block_index: block.index,
        });
    }
    // rounding may push a component just outside the item range
    let vector = acc
        .mean(resolved)
        .into_iter()
        .zip(lo.iter().zip(&hi))
        .map(|(m, (&l, &h))| m.clamp(l, h))
        .collect();
    Ok(UserBlockEmbedding {
        user_id: block.user_id.clone(),
        kind: block.kind,
        block_index: block.index,
        vector,
    })
}
