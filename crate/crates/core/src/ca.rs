//! Correspondence analysis of a contingency table.
//!
//! The table is normalized to the correspondence matrix P = N/n, centered by
//! the product of its margins, standardized to A = Dr^{-1/2}(P - r c^T)
//! Dc^{-1/2}, and decomposed by SVD. Standard coordinates are the
//! mass-whitened singular vectors; principal coordinates scale them by the
//! singular values. Rows and columns with a zero margin are dropped first
//! with an explicit record, because the whitening is undefined there.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::confrontation::ConfrontationMatrix;

/// Singular values at or below `RANK_CUTOFF * max(sv_max, 1)` are treated as
/// numerical zeros. Residual singular values of a correspondence matrix
/// never exceed 1, so the relative and absolute readings coincide.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaError {
    #[error("matrix sum is zero; correspondence analysis is undefined")]
    EmptyMatrix,
    #[error("fewer than two non-empty rows or columns remain after dropping zero margins")]
    DegenerateMatrix,
}

/// A non-negative contingency table of arbitrary shape.
#[derive(Debug, Clone, PartialEq)]
pub struct CountGrid {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl CountGrid {
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| v as f64))
            .collect();
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for (idx, &v) in self.data.iter().enumerate() {
            sums[idx % self.cols] += v;
        }
        sums
    }
}

impl From<&ConfrontationMatrix> for CountGrid {
    fn from(matrix: &ConfrontationMatrix) -> Self {
        Self {
            rows: crate::confrontation::ROWS,
            cols: crate::confrontation::COLS,
            data: matrix.to_dense(),
        }
    }
}

/// Masses, singular values, and coordinates from one CA run.
///
/// All matrices have one row per *surviving* feature;
/// `surviving_rows`/`surviving_cols` map those back to original indices.
#[derive(Debug, Clone)]
pub struct CaResult {
    pub n: f64,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
    /// Retained singular values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Row standard coordinates (Phi), surviving rows x K.
    pub row_standard: DMatrix<f64>,
    /// Column standard coordinates (Gamma), surviving cols x K.
    pub col_standard: DMatrix<f64>,
    /// Row principal coordinates F = Phi * diag(sv).
    pub row_principal: DMatrix<f64>,
    /// Column principal coordinates G = Gamma * diag(sv).
    pub col_principal: DMatrix<f64>,
    pub surviving_rows: Vec<usize>,
    pub surviving_cols: Vec<usize>,
    pub dropped_rows: Vec<usize>,
    pub dropped_cols: Vec<usize>,
    /// Sum of squared singular values, i.e. chi-square / n.
    pub total_inertia: f64,
}

impl CaResult {
    /// Number of retained dimensions.
    pub fn k(&self) -> usize {
        self.singular_values.len()
    }

    /// Position of an original row index among the surviving rows.
    pub fn row_position(&self, original: usize) -> Option<usize> {
        self.surviving_rows.iter().position(|&r| r == original)
    }

    pub fn col_position(&self, original: usize) -> Option<usize> {
        self.surviving_cols.iter().position(|&c| c == original)
    }

    /// Fraction of total inertia carried by dimension `dim`.
    pub fn explained_inertia(&self, dim: usize) -> f64 {
        if self.total_inertia <= 0.0 {
            0.0
        } else {
            self.singular_values[dim].powi(2) / self.total_inertia
        }
    }

    /// JSON export with fixed field names; numeric values are rounded to 12
    /// significant digits. Labels are indexed in original feature order.
    pub fn to_json(&self, row_labels: &[&str], col_labels: &[&str]) -> serde_json::Value {
        fn matrix_json(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| sig12(m[(i, j)])).collect())
                .collect()
        }
        #[derive(Serialize)]
        struct Export<'a> {
            n: f64,
            total_inertia: f64,
            singular_values: Vec<f64>,
            rows: Vec<&'a str>,
            cols: Vec<&'a str>,
            row_masses: Vec<f64>,
            col_masses: Vec<f64>,
            row_standard: Vec<Vec<f64>>,
            col_standard: Vec<Vec<f64>>,
            row_principal: Vec<Vec<f64>>,
            col_principal: Vec<Vec<f64>>,
            dropped_rows: Vec<&'a str>,
            dropped_cols: Vec<&'a str>,
        }
        let export = Export {
            n: sig12(self.n),
            total_inertia: sig12(self.total_inertia),
            singular_values: self.singular_values.iter().map(|&v| sig12(v)).collect(),
            rows: self.surviving_rows.iter().map(|&i| row_labels[i]).collect(),
            cols: self.surviving_cols.iter().map(|&j| col_labels[j]).collect(),
            row_masses: self.row_masses.iter().map(|&v| sig12(v)).collect(),
            col_masses: self.col_masses.iter().map(|&v| sig12(v)).collect(),
            row_standard: matrix_json(&self.row_standard),
            col_standard: matrix_json(&self.col_standard),
            row_principal: matrix_json(&self.row_principal),
            col_principal: matrix_json(&self.col_principal),
            dropped_rows: self.dropped_rows.iter().map(|&i| row_labels[i]).collect(),
            dropped_cols: self.dropped_cols.iter().map(|&j| col_labels[j]).collect(),
        };
        serde_json::to_value(export).expect("CA result serializes")
    }
}

/// Round to 12 significant digits for stable exports.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

struct Margins {
    n: f64,
    row_masses: Vec<f64>,
    col_masses: Vec<f64>,
    surviving_rows: Vec<usize>,
    surviving_cols: Vec<usize>,
    dropped_rows: Vec<usize>,
    dropped_cols: Vec<usize>,
}

fn margins(grid: &CountGrid) -> Result<Margins, CaError> {
    let n = grid.sum();
    if n <= 0.0 {
        return Err(CaError::EmptyMatrix);
    }
    let row_sums = grid.row_sums();
    let col_sums = grid.col_sums();
    let (surviving_rows, dropped_rows): (Vec<usize>, Vec<usize>) =
        (0..grid.nrows()).partition(|&i| row_sums[i] > 0.0);
    let (surviving_cols, dropped_cols): (Vec<usize>, Vec<usize>) =
        (0..grid.ncols()).partition(|&j| col_sums[j] > 0.0);
    Ok(Margins {
        n,
        row_masses: surviving_rows.iter().map(|&i| row_sums[i] / n).collect(),
        col_masses: surviving_cols.iter().map(|&j| col_sums[j] / n).collect(),
        surviving_rows,
        surviving_cols,
        dropped_rows,
        dropped_cols,
    })
}

/// Standardized residuals over the surviving rows and columns.
fn standardized_residuals(grid: &CountGrid, m: &Margins) -> DMatrix<f64> {
    DMatrix::from_fn(m.surviving_rows.len(), m.surviving_cols.len(), |i, j| {
        let p = grid.get(m.surviving_rows[i], m.surviving_cols[j]) / m.n;
        let expected = m.row_masses[i] * m.col_masses[j];
        (p - expected) / expected.sqrt()
    })
}

/// Thin SVD with descending singular values and a fixed sign convention:
/// the largest-magnitude entry of each left singular vector is positive.
fn deterministic_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = a.clone().svd(true, true);
    let u_raw = svd.u.expect("u requested");
    let vt_raw = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| {
        svd.singular_values[y]
            .partial_cmp(&svd.singular_values[x])
            .expect("singular values are finite")
    });

    let mut u = DMatrix::zeros(u_raw.nrows(), order.len());
    let mut v = DMatrix::zeros(vt_raw.ncols(), order.len());
    let mut sv = Vec::with_capacity(order.len());
    for (k, &src) in order.iter().enumerate() {
        sv.push(svd.singular_values[src]);
        let mut flip = false;
        let mut best = 0.0;
        for i in 0..u_raw.nrows() {
            let value = u_raw[(i, src)];
            if value.abs() > best {
                best = value.abs();
                flip = value < 0.0;
            }
        }
        let sign = if flip { -1.0 } else { 1.0 };
        for i in 0..u_raw.nrows() {
            u[(i, k)] = sign * u_raw[(i, src)];
        }
        for j in 0..vt_raw.ncols() {
            v[(j, k)] = sign * vt_raw[(src, j)];
        }
    }
    (u, sv, v)
}

fn assemble(m: Margins, a: &DMatrix<f64>) -> CaResult {
    let (u, sv, v) = deterministic_svd(a);
    let total_inertia: f64 = sv.iter().map(|s| s * s).sum();
    let cutoff = RANK_CUTOFF * sv.first().copied().unwrap_or(0.0).max(1.0);
    let k = sv.iter().take_while(|&&s| s > cutoff).count();

    let row_standard = DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, j)] / m.row_masses[i].sqrt());
    let col_standard = DMatrix::from_fn(v.nrows(), k, |i, j| v[(i, j)] / m.col_masses[i].sqrt());
    let row_principal = DMatrix::from_fn(u.nrows(), k, |i, j| row_standard[(i, j)] * sv[j]);
    let col_principal = DMatrix::from_fn(v.nrows(), k, |i, j| col_standard[(i, j)] * sv[j]);

    CaResult {
        n: m.n,
        row_masses: m.row_masses,
        col_masses: m.col_masses,
        singular_values: sv[..k].to_vec(),
        row_standard,
        col_standard,
        row_principal,
        col_principal,
        surviving_rows: m.surviving_rows,
        surviving_cols: m.surviving_cols,
        dropped_rows: m.dropped_rows,
        dropped_cols: m.dropped_cols,
        total_inertia,
    }
}

/// Run correspondence analysis on a contingency table.
pub fn run_ca(grid: &CountGrid) -> Result<CaResult, CaError> {
    let m = margins(grid)?;
    if m.surviving_rows.len() < 2 || m.surviving_cols.len() < 2 {
        return Err(CaError::DegenerateMatrix);
    }
    let a = standardized_residuals(grid, &m);
    Ok(assemble(m, &a))
}

/// Subset CA: restrict the rows of the standardized residual matrix while
/// keeping the masses of the full table, then decompose the restriction.
pub fn subset_ca(grid: &CountGrid, row_subset: &[usize]) -> Result<CaResult, CaError> {
    let m = margins(grid)?;
    if m.surviving_rows.len() < 2 || m.surviving_cols.len() < 2 {
        return Err(CaError::DegenerateMatrix);
    }
    let mut keep: Vec<usize> = (0..m.surviving_rows.len())
        .filter(|&pos| row_subset.contains(&m.surviving_rows[pos]))
        .collect();
    keep.sort_unstable();
    if keep.is_empty() {
        return Err(CaError::DegenerateMatrix);
    }

    let a_full = standardized_residuals(grid, &m);
    let a_subset = DMatrix::from_fn(keep.len(), a_full.ncols(), |i, j| a_full[(keep[i], j)]);
    let subset_margins = Margins {
        n: m.n,
        row_masses: keep.iter().map(|&pos| m.row_masses[pos]).collect(),
        col_masses: m.col_masses,
        surviving_rows: keep.iter().map(|&pos| m.surviving_rows[pos]).collect(),
        surviving_cols: m.surviving_cols,
        dropped_rows: m.dropped_rows,
        dropped_cols: m.dropped_cols,
    };
    Ok(assemble(subset_margins, &a_subset))
}

/// Observed-to-expected ratios P_ij / (r_i c_j); `None` where a margin is
/// zero and the ratio is undefined.
pub fn alpha_matrix(grid: &CountGrid) -> Result<Vec<Vec<Option<f64>>>, CaError> {
    let n = grid.sum();
    if n <= 0.0 {
        return Err(CaError::EmptyMatrix);
    }
    let row_sums = grid.row_sums();
    let col_sums = grid.col_sums();
    Ok((0..grid.nrows())
        .map(|i| {
            (0..grid.ncols())
                .map(|j| {
                    let expected = (row_sums[i] / n) * (col_sums[j] / n);
                    if expected > 0.0 {
                        Some(grid.get(i, j) / n / expected)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect())
}
