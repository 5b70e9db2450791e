//! Dense row-major point matrices.
//!
//! Designs, candidate sets and precandidates are all `n × dim` matrices whose
//! rows are accessed far more often than columns, so they are stored as one
//! contiguous row-major buffer.

use crate::error::{contract, Result};

/// An `n × dim` matrix of points, one point per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    /// Creates an empty matrix with rows of length `dim`.
    pub fn new(dim: usize) -> Self {
        Self { data: Vec::new(), dim }
    }

    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        Self {
            data: Vec::with_capacity(dim * rows),
            dim,
        }
    }

    /// Wraps a row-major buffer. Fails if `data.len()` is not a multiple of `dim`.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(contract("points must have dimension >= 1"));
        }
        if data.len() % dim != 0 {
            return Err(contract(format!(
                "buffer of length {} is not a whole number of rows of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    /// Builds a matrix from row vectors. All rows must share one length >= 1.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or_else(|| contract("cannot infer dimension from zero rows"))?;
        let mut out = Self::with_capacity(dim, rows.len());
        for r in rows {
            out.push(r.as_ref())?;
        }
        if dim == 0 {
            return Err(contract("points must have dimension >= 1"));
        }
        Ok(out)
    }

    /// Creates an `n × dim` matrix of zeros.
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            data: vec![0.0; rows * dim],
            dim,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(contract(format!(
                "row of length {} pushed into matrix of dimension {}",
                row.len(),
                self.dim
            )));
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// True when every coordinate lies in `[0, 1]`.
    pub fn in_unit_cube(&self) -> bool {
        self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// True when every coordinate is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Clamps every coordinate of `x` into `[0, 1]`.
#[inline]
pub fn clamp_unit(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

/// True if any coordinate of `x` lies outside `[0, 1]`.
#[inline]
pub fn outside_unit(x: &[f64]) -> bool {
    x.iter().any(|v| !(0.0..=1.0).contains(v))
}
