use std::collections::HashSet;

use crate::error::{Error, Result};

/// N identified points of dimension D, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, ids: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("point dimension must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::Argument(format!(
                "{} ids but {} values for dimension {dim}",
                ids.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("point set contains non-finite values".into()));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::Integrity(format!("duplicate point id `{dup}`")));
        }
        Ok(Self { dim, ids, data })
    }

    /// Builds a point set from rows, naming points by their index.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != dim {
                return Err(Error::Argument(format!(
                    "row {i} has {} values, expected {dim}",
                    r.as_ref().len()
                )));
            }
            data.extend_from_slice(r.as_ref());
        }
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(dim, ids, data)
    }

    pub fn from_identified_rows<R: AsRef<[f64]>>(ids: Vec<String>, rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != dim) {
            return Err(Error::Argument("rows differ in dimension".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(dim, ids, data)
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

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + Clone {
        self.data.chunks_exact(self.dim)
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.point(i));
            ids.push(self.ids[i].clone());
        }
        PointSet {
            dim: self.dim,
            ids,
            data,
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.iter() {
            for (a, x) in m.iter_mut().zip(p) {
                *a += x;
            }
        }
        let n = self.len() as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}
