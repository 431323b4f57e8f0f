//! Sampled process values on an explicit time grid.

use std::io::{self, Write};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("times and values have different lengths ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error("grid must be strictly increasing (violation at index {0})")]
    NonMonotoneGrid(usize),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grids do not match at index {0}")]
    GridMismatch(usize),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("covariance factorization failed at pivot {pivot}; retry with diagonal jitter ~{suggested_jitter:e}")]
    Factorization { pivot: usize, suggested_jitter: f64 },
}

/// How a grid was generated; carried along for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Dyadic grid k / 2^j, k = 0..2^j.
    Dyadic(u32),
    /// Uniform grid with n cells.
    Uniform(usize),
    Explicit,
}

/// Process values sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOnGrid {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: GridKind,
}

impl PathOnGrid {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: GridKind) -> Result<Self, PathError> {
        if times.is_empty() {
            return Err(PathError::EmptyGrid);
        }
        if times.len() != values.len() {
            return Err(PathError::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(PathError::NonMonotoneGrid(i));
            }
        }
        Ok(Self { times, values, kind })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV export with columns `t,value`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }
}

/// Supremum distance between two paths sharing one grid.
pub fn sup_distance(a: &PathOnGrid, b: &PathOnGrid) -> Result<f64, PathError> {
    if a.len() != b.len() {
        return Err(PathError::GridMismatch(a.len().min(b.len())));
    }
    for (i, (s, t)) in a.times.iter().zip(&b.times).enumerate() {
        if s != t {
            return Err(PathError::GridMismatch(i));
        }
    }
    Ok(a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}

/// Dyadic grid k / 2^j for k = 0..2^j.
pub fn dyadic_grid(j: u32) -> Vec<f64> {
    let n = 1usize << j;
    let h = 1.0 / n as f64;
    (0..=n).map(|k| k as f64 * h).collect()
}

/// Uniform grid of n cells on [0, t_max] (n + 1 points).
pub fn uniform_grid(n: usize, t_max: f64) -> Vec<f64> {
    (0..=n).map(|k| k as f64 * t_max / n as f64).collect()
}
