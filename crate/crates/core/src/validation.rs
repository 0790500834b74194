//! Rule-stability validation via Procrustes superimposition.
//!
//! A player's records are split into train (older) and test (last year of
//! play); each half gets its own confrontation matrix and CA; the stacked
//! row-and-column principal coordinates, restricted to features surviving in
//! both analyses and aligned by label, are superimposed by the symmetric
//! Procrustes statistic. Both configurations are centered and scaled to unit
//! norm, so delta_sq = 1 - (sum of singular values)^2 lies in [0, 1]:
//! 0 means identical shapes, and reflections are free because CA axis signs
//! are arbitrary.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::ca::{run_ca, sig12, CaError, CaResult, CountGrid};
use crate::confrontation::build_matrix;
use crate::corpus::{filter_records, holdout_split, CorpusError, CorpusStore, FilterTuple};
use crate::lexicon::FeatureLexicon;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("configurations must share shape with N >= 2, got {0} x {1} vs {2} x {3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("configuration needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("configuration has zero spread; superimposition is undefined")]
    ZeroNorm,
    #[error("{0} half of the holdout split is empty")]
    InsufficientData(&'static str),
    #[error("only {0} features survive in both halves; at least 3 are needed")]
    DegenerateConfiguration(usize),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Ca(#[from] CaError),
}

/// The optimal similarity transform mapping Y onto X.
#[derive(Debug, Clone, Serialize)]
pub struct ProcrustesTransform {
    /// d x d orthogonal matrix, row-major; determinant is +1 or -1.
    pub rotation: Vec<Vec<f64>>,
    pub scale: f64,
    pub translation: Vec<f64>,
    pub reflection: bool,
}

/// Result of one superimposition.
#[derive(Debug, Clone, Serialize)]
pub struct ProcrustesFit {
    /// Symmetric normalized statistic in [0, 1].
    pub delta_sq: f64,
    /// Residual sum of squares in the scale of the centered X.
    pub raw_residual: f64,
    pub transform: ProcrustesTransform,
}

/// Least-squares superimposition of two labeled configurations.
///
/// Rows must correspond: same feature, same position. Reflections are
/// permitted.
pub fn procrustes(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<ProcrustesFit, ValidationError> {
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(ValidationError::ShapeMismatch(
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols(),
        ));
    }
    let (n, d) = (x.nrows(), x.ncols());
    if n < 2 {
        return Err(ValidationError::TooFewPoints(n));
    }

    let mean_x: Vec<f64> = (0..d).map(|c| x.column(c).sum() / n as f64).collect();
    let mean_y: Vec<f64> = (0..d).map(|c| y.column(c).sum() / n as f64).collect();
    let xc = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean_x[j]);
    let yc = DMatrix::from_fn(n, d, |i, j| y[(i, j)] - mean_y[j]);
    let norm_x = xc.norm();
    let norm_y = yc.norm();
    if norm_x == 0.0 || norm_y == 0.0 {
        return Err(ValidationError::ZeroNorm);
    }
    let x0 = &xc / norm_x;
    let y0 = &yc / norm_y;

    // Cross-product SVD gives the optimal rotation; reflections come free
    // because we never force det(+1).
    let m = x0.transpose() * &y0;
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let trace: f64 = svd.singular_values.iter().sum();
    let delta_sq = (1.0 - trace * trace).clamp(0.0, 1.0);

    // Rotation applied on the right of row-vector configurations: Y0 * R.
    let rotation_matrix = vt.transpose() * u.transpose();
    let det = rotation_matrix.determinant();

    // Scale mapping the centered Y onto the centered X in original units.
    let scale = trace * norm_x / norm_y;
    let fitted = (&yc * &rotation_matrix) * scale;
    let raw_residual = (&xc - &fitted).norm_squared();

    let rotation: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| rotation_matrix[(i, j)]).collect())
        .collect();
    Ok(ProcrustesFit {
        delta_sq,
        raw_residual,
        transform: ProcrustesTransform {
            rotation,
            scale,
            translation: mean_x,
            reflection: det < 0.0,
        },
    })
}

/// One player's stability report, mirroring the holdout table columns.
#[derive(Debug, Clone, Serialize)]
pub struct ProcrustesReport {
    pub player: String,
    pub balls_train: usize,
    pub balls_test: usize,
    pub delta_sq: f64,
    pub raw_residual: f64,
    pub dims: usize,
    pub common_features: usize,
    pub transform: ProcrustesTransform,
}

impl ProcrustesReport {
    pub fn csv_header() -> &'static str {
        "player,balls_train,balls_test,delta_sq\n"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{:.4}\n",
            self.player, self.balls_train, self.balls_test, self.delta_sq
        )
    }
}

/// Stack surviving row and column principal coordinates, in the first
/// `dims` dimensions, zero-padding when an analysis retained fewer.
/// `rows`/`cols` select original feature indices, in order.
fn configuration(ca: &CaResult, rows: &[usize], cols: &[usize], dims: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len() + cols.len(), dims, |i, k| {
        if i < rows.len() {
            let pos = ca.row_position(rows[i]).expect("row survives");
            if k < ca.k() {
                ca.row_principal[(pos, k)]
            } else {
                0.0
            }
        } else {
            let pos = ca.col_position(cols[i - rows.len()]).expect("col survives");
            if k < ca.k() {
                ca.col_principal[(pos, k)]
            } else {
                0.0
            }
        }
    })
}

/// Train/test stability of one player's biplot configuration.
pub fn validate_player(
    store: &CorpusStore,
    filter: &FilterTuple,
    lexicon: &FeatureLexicon,
    window_days: u32,
    dims: usize,
) -> Result<ProcrustesReport, ValidationError> {
    let outcome = filter_records(store, filter)?;
    let (train, test) = holdout_split(&outcome.records, window_days)?;
    if train.is_empty() {
        return Err(ValidationError::InsufficientData("train"));
    }
    if test.is_empty() {
        return Err(ValidationError::InsufficientData("test"));
    }

    let train_ca = run_ca(&CountGrid::from(&build_matrix(&train, lexicon)))?;
    let test_ca = run_ca(&CountGrid::from(&build_matrix(&test, lexicon)))?;

    // Features surviving in BOTH halves, aligned by label (original index),
    // never by position: drops can differ between halves.
    let rows: Vec<usize> = train_ca
        .surviving_rows
        .iter()
        .copied()
        .filter(|&r| test_ca.row_position(r).is_some())
        .collect();
    let cols: Vec<usize> = train_ca
        .surviving_cols
        .iter()
        .copied()
        .filter(|&c| test_ca.col_position(c).is_some())
        .collect();
    if rows.len() + cols.len() < 3 {
        return Err(ValidationError::DegenerateConfiguration(
            rows.len() + cols.len(),
        ));
    }

    let fit = procrustes(
        &configuration(&train_ca, &rows, &cols, dims),
        &configuration(&test_ca, &rows, &cols, dims),
    )?;
    Ok(ProcrustesReport {
        player: filter.player.clone(),
        balls_train: train.len(),
        balls_test: test.len(),
        delta_sq: sig12(fit.delta_sq),
        raw_residual: sig12(fit.raw_residual),
        dims,
        common_features: rows.len() + cols.len(),
        transform: fit.transform,
    })
}
