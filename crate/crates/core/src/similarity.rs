//! Per-player strength/weakness vectors and their 2-D embedding.
//!
//! Each player contributes one vector per polarity: the anchor feature's row
//! profile concatenated with the top bowling feature's column profile
//! (31 = 12 + 19 dimensions), or, in coordinate mode, the anchor's row
//! principal coordinates concatenated with the top column's principal
//! coordinates. Vectors are embedded with exact t-SNE: full pairwise
//! distances, per-point bandwidth found by bisection against the target
//! perplexity, early exaggeration, and momentum gradient descent. Every
//! random draw comes from one seeded generator, so embeddings are
//! reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca::CaResult;
use crate::confrontation::ConfrontationMatrix;
use crate::exec::{self, Execution};
use crate::lexicon::{BattingFeature, BowlingFeature};
use crate::rules::{anchor_feature, score_bowling_features, PlayerRole, RuleError};

const EXAGGERATION_FACTOR: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_SWITCH_ITER: usize = 250;
const EARLY_MOMENTUM: f64 = 0.5;
const LATE_MOMENTUM: f64 = 0.8;
const PERPLEXITY_TOLERANCE: f64 = 1e-3;
const MAX_BISECTION_STEPS: usize = 64;
/// Rows handed to one rayon task; single t-SNE rows are too small to pay
/// for per-row scheduling.
const ROW_CHUNK: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum TsneError {
    #[error("t-SNE needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("perplexity {perplexity} infeasible for {n} points (must be <= {max})")]
    PerplexityInfeasible { perplexity: f64, n: usize, max: f64 },
    #[error("perplexity must be positive, got {0}")]
    NonPositivePerplexity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Strength,
    Weakness,
}

impl Polarity {
    pub fn name(self) -> &'static str {
        match self {
            Polarity::Strength => "strength",
            Polarity::Weakness => "weakness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorMode {
    /// Row profile of the anchor (12 entries) followed by the column profile
    /// of the top bowling feature (19 entries): 31 dimensions.
    Profile,
    /// Anchor row principal coordinates followed by the top column principal
    /// coordinates; halves are zero-padded to a common width per batch.
    Coordinate,
}

impl VectorMode {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "profile" => Some(VectorMode::Profile),
            "coordinate" => Some(VectorMode::Coordinate),
            _ => None,
        }
    }
}

/// One player's strength or weakness vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerVector {
    pub player: String,
    pub polarity: Polarity,
    pub role: PlayerRole,
    pub top_bowling_feature: BowlingFeature,
    pub mode: VectorMode,
    anchor_part: Vec<f64>,
    top_part: Vec<f64>,
}

impl PlayerVector {
    pub fn parts(&self) -> (&[f64], &[f64]) {
        (&self.anchor_part, &self.top_part)
    }

    pub fn label(&self) -> String {
        format!("{} - {}", self.player, self.top_bowling_feature.name())
    }
}

/// Build the vector for one player from their confrontation matrix and its
/// CA. The top bowling feature is the rank-1 scoring result for the
/// polarity's anchor over min(2, K) dimensions.
pub fn player_vector(
    matrix: &ConfrontationMatrix,
    ca: &CaResult,
    player: &str,
    role: PlayerRole,
    polarity: Polarity,
    mode: VectorMode,
) -> Result<PlayerVector, RuleError> {
    let anchor = anchor_feature(role, polarity == Polarity::Strength);
    let dims = ca.k().min(2);
    let scored = score_bowling_features(ca, anchor, dims)?;
    let top = scored[0].0;

    let (anchor_part, top_part) = match mode {
        VectorMode::Profile => {
            let row_sum: u64 = BowlingFeature::ALL
                .iter()
                .map(|&b| matrix.get(anchor, b))
                .sum();
            let anchor_part: Vec<f64> = BowlingFeature::ALL
                .iter()
                .map(|&b| {
                    if row_sum == 0 {
                        0.0
                    } else {
                        matrix.get(anchor, b) as f64 / row_sum as f64
                    }
                })
                .collect();
            let col_sum: u64 = BattingFeature::ALL
                .iter()
                .map(|&a| matrix.get(a, top))
                .sum();
            let top_part: Vec<f64> = BattingFeature::ALL
                .iter()
                .map(|&a| {
                    if col_sum == 0 {
                        0.0
                    } else {
                        matrix.get(a, top) as f64 / col_sum as f64
                    }
                })
                .collect();
            (anchor_part, top_part)
        }
        VectorMode::Coordinate => {
            let row = ca
                .row_position(anchor.index())
                .ok_or(RuleError::FeatureUnavailable(anchor))?;
            let col = ca
                .col_position(top.index())
                .expect("top feature survived scoring");
            let anchor_part = (0..ca.k()).map(|k| ca.row_principal[(row, k)]).collect();
            let top_part = (0..ca.k()).map(|k| ca.col_principal[(col, k)]).collect();
            (anchor_part, top_part)
        }
    };

    Ok(PlayerVector {
        player: player.to_string(),
        polarity,
        role,
        top_bowling_feature: top,
        mode,
        anchor_part,
        top_part,
    })
}

/// Stack vectors for embedding, zero-padding each half to the batch maximum
/// so coordinate-mode vectors share one width. Profile mode is always
/// 12 + 19 = 31 wide.
pub fn stack_vectors(vectors: &[PlayerVector]) -> Vec<Vec<f64>> {
    let anchor_width = vectors
        .iter()
        .map(|v| v.anchor_part.len())
        .max()
        .unwrap_or(0);
    let top_width = vectors.iter().map(|v| v.top_part.len()).max().unwrap_or(0);
    vectors
        .iter()
        .map(|v| {
            let mut row = vec![0.0; anchor_width + top_width];
            row[..v.anchor_part.len()].copy_from_slice(&v.anchor_part);
            row[anchor_width..anchor_width + v.top_part.len()].copy_from_slice(&v.top_part);
            row
        })
        .collect()
}

/// t-SNE hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TsneParams {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for TsneParams {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Raw result of one t-SNE run.
#[derive(Debug, Clone)]
pub struct TsneSolution {
    pub coords: Vec<[f64; 2]>,
    pub final_kl: f64,
    /// KL divergence measured at iteration 300 (after exaggeration ends),
    /// when the run is long enough to reach it.
    pub kl_at_iter_300: Option<f64>,
    /// Worst per-point |perplexity(P_i) - target| after bisection.
    pub max_calibration_error: f64,
}

/// One labeled point of an embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingEntry {
    pub player: String,
    pub polarity: Polarity,
    pub bowling_feature: BowlingFeature,
    pub x: f64,
    pub y: f64,
}

impl EmbeddingEntry {
    /// "player - bowling feature" display label.
    pub fn label(&self) -> String {
        format!("{} - {}", self.player, self.bowling_feature.name())
    }
}

/// A finished 2-D similarity map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Embedding {
    pub entries: Vec<EmbeddingEntry>,
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub final_kl: f64,
    pub kl_at_iter_300: Option<f64>,
    pub max_calibration_error: f64,
}

impl Embedding {
    /// CSV export: player, polarity, bowling_feature, x, y.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("player,polarity,bowling_feature,x,y\n");
        for entry in &self.entries {
            out.push_str(&format!(
                "{},{},{},{:.12e},{:.12e}\n",
                entry.player,
                entry.polarity.name(),
                entry.bowling_feature.name(),
                entry.x,
                entry.y
            ));
        }
        out
    }
}

/// Embed player vectors with exact t-SNE.
pub fn embed_tsne(
    vectors: &[PlayerVector],
    perplexity: f64,
    iterations: usize,
    seed: u64,
) -> Result<Embedding, TsneError> {
    embed_tsne_with(
        vectors,
        &TsneParams {
            perplexity,
            iterations,
            seed,
            ..TsneParams::default()
        },
    )
}

pub fn embed_tsne_with(
    vectors: &[PlayerVector],
    params: &TsneParams,
) -> Result<Embedding, TsneError> {
    let points = stack_vectors(vectors);
    let solution = embed_points(&points, params)?;
    let entries = vectors
        .iter()
        .zip(&solution.coords)
        .map(|(v, &[x, y])| EmbeddingEntry {
            player: v.player.clone(),
            polarity: v.polarity,
            bowling_feature: v.top_bowling_feature,
            x,
            y,
        })
        .collect();
    Ok(Embedding {
        entries,
        perplexity: params.perplexity,
        iterations: params.iterations,
        learning_rate: params.learning_rate,
        seed: params.seed,
        final_kl: solution.final_kl,
        kl_at_iter_300: solution.kl_at_iter_300,
        max_calibration_error: solution.max_calibration_error,
    })
}

fn check_params(n: usize, perplexity: f64) -> Result<(), TsneError> {
    if n < 4 {
        return Err(TsneError::TooFewPoints(n));
    }
    if perplexity <= 0.0 {
        return Err(TsneError::NonPositivePerplexity(perplexity));
    }
    let max = (n as f64 - 1.0) / 3.0;
    if perplexity > max {
        return Err(TsneError::PerplexityInfeasible { perplexity, n, max });
    }
    Ok(())
}

/// Pairwise squared Euclidean distances, row-major n x n.
fn squared_distances(points: &[Vec<f64>], exec: Execution) -> Vec<f64> {
    let n = points.len();
    let rows = exec::map_indexed_chunked(exec, n, ROW_CHUNK, |i| {
        let mut row = vec![0.0; n];
        for j in 0..n {
            if i != j {
                row[j] = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
            }
        }
        row
    });
    rows.concat()
}

/// Conditional distribution for one point at a given precision, with its
/// perplexity. The self-pair is excluded.
fn conditional_row(distances: &[f64], n: usize, i: usize, beta: f64) -> (Vec<f64>, f64) {
    let mut min_dist = f64::INFINITY;
    for j in 0..n {
        if j != i {
            min_dist = min_dist.min(distances[i * n + j]);
        }
    }
    let mut row = vec![0.0; n];
    let mut sum = 0.0;
    let mut weighted = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let shifted = distances[i * n + j] - min_dist;
        let w = (-beta * shifted).exp();
        row[j] = w;
        sum += w;
        weighted += shifted * w;
    }
    for value in &mut row {
        *value /= sum;
    }
    // Shannon entropy in nats via H = ln S + beta * E[d]; perplexity = e^H.
    let entropy = sum.ln() + beta * weighted / sum;
    (row, entropy.exp())
}

/// Symmetrized joint probabilities P and the worst per-point calibration
/// error. P is n x n row-major, zero on the diagonal, and sums to 1.
pub fn joint_probabilities(
    points: &[Vec<f64>],
    perplexity: f64,
    exec: Execution,
) -> Result<(Vec<f64>, f64), TsneError> {
    let n = points.len();
    check_params(n, perplexity)?;
    let distances = squared_distances(points, exec);

    let conditionals = exec::map_indexed_chunked(exec, n, ROW_CHUNK, |i| {
        let mut beta = 1.0;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        let (mut row, mut perp) = conditional_row(&distances, n, i, beta);
        for _ in 0..MAX_BISECTION_STEPS {
            let diff = perp - perplexity;
            if diff.abs() <= PERPLEXITY_TOLERANCE {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta * 2.0
                } else {
                    0.5 * (beta + beta_max)
                };
            } else {
                beta_max = beta;
                beta = if beta_min == f64::NEG_INFINITY {
                    beta * 0.5
                } else {
                    0.5 * (beta + beta_min)
                };
            }
            let next = conditional_row(&distances, n, i, beta);
            row = next.0;
            perp = next.1;
        }
        (row, (perp - perplexity).abs())
    });

    let max_calibration_error = conditionals.iter().map(|(_, err)| *err).fold(0.0, f64::max);
    let mut joint = vec![0.0; n * n];
    let denom = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                joint[i * n + j] = (conditionals[i].0[j] + conditionals[j].0[i]) / denom;
            }
        }
    }
    Ok((joint, max_calibration_error))
}

/// Student-t affinity numerators w_ij = (1 + |y_i - y_j|^2)^{-1} and their
/// total, computed row by row so parallel and sequential sums agree exactly.
fn student_weights(coords: &[[f64; 2]], exec: Execution) -> (Vec<f64>, f64) {
    let n = coords.len();
    let rows = exec::map_indexed_chunked(exec, n, ROW_CHUNK, |i| {
        let mut row = vec![0.0; n];
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let dx = coords[i][0] - coords[j][0];
                let dy = coords[i][1] - coords[j][1];
                let w = 1.0 / (1.0 + dx * dx + dy * dy);
                row[j] = w;
                row_sum += w;
            }
        }
        (row, row_sum)
    });
    let mut weights = Vec::with_capacity(n * n);
    let mut total = 0.0;
    for (row, row_sum) in rows {
        weights.extend(row);
        total += row_sum;
    }
    (weights, total)
}

fn kl_divergence(p: &[f64], weights: &[f64], z: f64) -> f64 {
    let mut kl = 0.0;
    for (idx, &pij) in p.iter().enumerate() {
        if pij > 0.0 {
            let q = (weights[idx] / z).max(1e-12);
            kl += pij * (pij / q).ln();
        }
    }
    kl
}

/// Exact t-SNE to two dimensions.
pub fn embed_points(points: &[Vec<f64>], params: &TsneParams) -> Result<TsneSolution, TsneError> {
    let n = points.len();
    let (p, max_calibration_error) = joint_probabilities(points, params.perplexity, params.exec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut coords: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            [1e-4 * x, 1e-4 * y]
        })
        .collect();
    let mut velocity = vec![[0.0f64; 2]; n];
    let mut kl_at_iter_300 = None;

    for iter in 0..params.iterations {
        let exaggeration = if iter < EXAGGERATION_ITERS {
            EXAGGERATION_FACTOR
        } else {
            1.0
        };
        let (weights, z) = student_weights(&coords, params.exec);
        if iter == 300 {
            kl_at_iter_300 = Some(kl_divergence(&p, &weights, z));
        }

        let coords_ref = &coords;
        let p_ref = &p;
        let weights_ref = &weights;
        let gradient = exec::map_indexed_chunked(params.exec, n, ROW_CHUNK, move |i| {
            let mut g = [0.0f64; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let idx = i * n + j;
                let q = weights_ref[idx] / z;
                let factor = 4.0 * (exaggeration * p_ref[idx] - q) * weights_ref[idx];
                g[0] += factor * (coords_ref[i][0] - coords_ref[j][0]);
                g[1] += factor * (coords_ref[i][1] - coords_ref[j][1]);
            }
            g
        });

        let momentum = if iter < MOMENTUM_SWITCH_ITER {
            EARLY_MOMENTUM
        } else {
            LATE_MOMENTUM
        };
        for i in 0..n {
            for d in 0..2 {
                velocity[i][d] = momentum * velocity[i][d] - params.learning_rate * gradient[i][d];
                coords[i][d] += velocity[i][d];
            }
        }
    }

    let (weights, z) = student_weights(&coords, params.exec);
    let final_kl = kl_divergence(&p, &weights, z);
    Ok(TsneSolution {
        coords,
        final_kl,
        kl_at_iter_300,
        max_calibration_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{run_ca, CountGrid};
    use crate::confrontation::{build_matrix, COLS, ROWS};
    use crate::corpus::synthetic::{generate_synthetic, planted_response_spec};
    use crate::lexicon::FeatureLexicon;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn planted_matrix(seed: u64) -> ConfrontationMatrix {
        let spec = planted_response_spec("Abel");
        let records = generate_synthetic(&spec, 4000, seed).unwrap();
        build_matrix(&records, &FeatureLexicon::bundled())
    }

    fn gaussian_clusters(n_per: usize, separation: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for cluster in 0..3 {
            for _ in 0..n_per {
                let mut v = vec![0.0; 31];
                for (d, value) in v.iter_mut().enumerate() {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    *value = noise + if d == cluster { separation } else { 0.0 };
                }
                points.push(v);
                labels.push(cluster);
            }
        }
        (points, labels)
    }

    #[test]
    fn profile_vector_halves_sum_to_one() {
        let matrix = planted_matrix(9);
        let ca = run_ca(&CountGrid::from(&matrix)).unwrap();
        let v = player_vector(
            &matrix,
            &ca,
            "Abel",
            PlayerRole::Batsman,
            Polarity::Strength,
            VectorMode::Profile,
        )
        .unwrap();
        let (anchor, top) = v.parts();
        assert_eq!(anchor.len(), COLS);
        assert_eq!(top.len(), ROWS);
        assert_abs_diff_eq!(anchor.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(top.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert!(anchor.iter().all(|&x| x >= 0.0));
        assert_eq!(stack_vectors(&[v])[0].len(), 31);
    }

    #[test]
    fn planted_top_feature_is_recovered() {
        let matrix = planted_matrix(21);
        let ca = run_ca(&CountGrid::from(&matrix)).unwrap();
        let strength = player_vector(
            &matrix,
            &ca,
            "Abel",
            PlayerRole::Batsman,
            Polarity::Strength,
            VectorMode::Profile,
        )
        .unwrap();
        assert_eq!(strength.top_bowling_feature, BowlingFeature::LegLine);
        let weakness = player_vector(
            &matrix,
            &ca,
            "Abel",
            PlayerRole::Batsman,
            Polarity::Weakness,
            VectorMode::Profile,
        )
        .unwrap();
        assert_eq!(weakness.top_bowling_feature, BowlingFeature::Swing);
        assert_eq!(weakness.label(), "Abel - swing");
    }

    #[test]
    fn identical_matrices_give_identical_vectors() {
        let matrix = planted_matrix(33);
        let ca = run_ca(&CountGrid::from(&matrix)).unwrap();
        for mode in [VectorMode::Profile, VectorMode::Coordinate] {
            let a = player_vector(
                &matrix,
                &ca,
                "X",
                PlayerRole::Batsman,
                Polarity::Strength,
                mode,
            )
            .unwrap();
            let b = player_vector(
                &matrix,
                &ca,
                "X",
                PlayerRole::Batsman,
                Polarity::Strength,
                mode,
            )
            .unwrap();
            assert_eq!(a.parts(), b.parts());
        }
    }

    #[test]
    fn coordinate_vectors_pad_to_common_width() {
        let matrix = planted_matrix(5);
        let ca = run_ca(&CountGrid::from(&matrix)).unwrap();
        let v = player_vector(
            &matrix,
            &ca,
            "Abel",
            PlayerRole::Batsman,
            Polarity::Strength,
            VectorMode::Coordinate,
        )
        .unwrap();
        let (anchor, top) = v.parts();
        assert_eq!(anchor.len(), ca.k());
        assert_eq!(top.len(), ca.k());

        let mut short = v.clone();
        short.anchor_part.truncate(1);
        short.top_part.truncate(1);
        let stacked = stack_vectors(&[v.clone(), short]);
        assert_eq!(stacked[0].len(), stacked[1].len());
        assert_eq!(stacked[1][1], 0.0);
    }

    #[test]
    fn perplexity_is_calibrated_per_point() {
        let (points, _) = gaussian_clusters(10, 10.0, 4);
        let (p, err) = joint_probabilities(&points, 5.0, Execution::Sequential).unwrap();
        assert!(err <= PERPLEXITY_TOLERANCE, "calibration error {err}");
        let n = points.len();
        // Symmetric, non-negative, sums to one.
        let total: f64 = p.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        for i in 0..n {
            for j in 0..n {
                assert!(p[i * n + j] >= 0.0);
                assert_abs_diff_eq!(p[i * n + j], p[j * n + i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn rigid_motion_leaves_p_unchanged() {
        let (points, _) = gaussian_clusters(8, 8.0, 6);
        let (p_base, _) = joint_probabilities(&points, 5.0, Execution::Sequential).unwrap();
        // Rotate in the (0, 1) plane and translate all points identically.
        let theta: f64 = 0.7;
        let moved: Vec<Vec<f64>> = points
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w[0] = v[0] * theta.cos() - v[1] * theta.sin() + 3.5;
                w[1] = v[0] * theta.sin() + v[1] * theta.cos() - 1.25;
                for value in w.iter_mut().skip(2) {
                    *value += 0.5;
                }
                w
            })
            .collect();
        let (p_moved, _) = joint_probabilities(&moved, 5.0, Execution::Sequential).unwrap();
        for (a, b) in p_base.iter().zip(&p_moved) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn identical_points_run_without_failure() {
        let points: Vec<Vec<f64>> = (0..6).map(|_| vec![1.0; 31]).collect();
        let params = TsneParams {
            perplexity: 1.5,
            iterations: 50,
            seed: 1,
            ..TsneParams::default()
        };
        let solution = embed_points(&points, &params).unwrap();
        assert!(solution
            .coords
            .iter()
            .all(|c| c[0].is_finite() && c[1].is_finite()));
        // All pairwise P equal by symmetry.
        let (p, _) = joint_probabilities(&points, 1.5, Execution::Sequential).unwrap();
        let off_diagonal: Vec<f64> = p.iter().copied().filter(|&v| v > 0.0).collect();
        for &v in &off_diagonal {
            assert_abs_diff_eq!(v, off_diagonal[0], epsilon = 1e-15);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let (points, _) = gaussian_clusters(8, 6.0, 9);
        let params = TsneParams {
            perplexity: 5.0,
            iterations: 400,
            seed: 77,
            ..TsneParams::default()
        };
        let a = embed_points(&points, &params).unwrap();
        let b = embed_points(&points, &params).unwrap();
        assert_eq!(a.coords, b.coords);
        assert_eq!(a.final_kl, b.final_kl);

        let mut different = params.clone();
        different.seed = 78;
        let c = embed_points(&points, &different).unwrap();
        assert_ne!(a.coords, c.coords);
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let (points, _) = gaussian_clusters(8, 6.0, 10);
        let seq = TsneParams {
            perplexity: 5.0,
            iterations: 150,
            seed: 3,
            exec: Execution::Sequential,
            ..TsneParams::default()
        };
        let par = TsneParams {
            exec: Execution::Parallel,
            ..seq.clone()
        };
        let a = embed_points(&points, &seq).unwrap();
        let b = embed_points(&points, &par).unwrap();
        assert_eq!(a.coords, b.coords);
        assert_eq!(a.final_kl, b.final_kl);
    }

    #[test]
    fn clusters_stay_together() {
        let (points, labels) = gaussian_clusters(10, 10.0, 12);
        let params = TsneParams {
            perplexity: 5.0,
            iterations: 1000,
            seed: 42,
            ..TsneParams::default()
        };
        let solution = embed_points(&points, &params).unwrap();
        let n = points.len();
        let mut same_cluster_nn = 0;
        for i in 0..n {
            let mut best = (f64::INFINITY, 0);
            for j in 0..n {
                if i != j {
                    let dx = solution.coords[i][0] - solution.coords[j][0];
                    let dy = solution.coords[i][1] - solution.coords[j][1];
                    let d = dx * dx + dy * dy;
                    if d < best.0 {
                        best = (d, j);
                    }
                }
            }
            if labels[i] == labels[best.1] {
                same_cluster_nn += 1;
            }
        }
        assert!(
            same_cluster_nn as f64 >= 0.9 * n as f64,
            "{same_cluster_nn}/{n} same-cluster nearest neighbors"
        );
        // Gradient descent kept improving after the exaggeration phase.
        let kl_300 = solution.kl_at_iter_300.unwrap();
        assert!(
            solution.final_kl < kl_300,
            "final {} vs iter-300 {}",
            solution.final_kl,
            kl_300
        );
        assert!(solution.max_calibration_error <= PERPLEXITY_TOLERANCE);
    }

    #[test]
    fn parameter_errors() {
        let points: Vec<Vec<f64>> = (0..3).map(|_| vec![0.0; 4]).collect();
        assert_eq!(
            embed_points(&points, &TsneParams::default()).unwrap_err(),
            TsneError::TooFewPoints(3)
        );
        let points: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64; 4]).collect();
        assert!(matches!(
            embed_points(
                &points,
                &TsneParams {
                    perplexity: 4.0,
                    ..TsneParams::default()
                }
            ),
            Err(TsneError::PerplexityInfeasible { .. })
        ));
    }

    #[test]
    fn embedding_csv_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vectors: Vec<PlayerVector> = (0..6)
            .map(|i| PlayerVector {
                player: format!("P{i}"),
                polarity: Polarity::Strength,
                role: PlayerRole::Batsman,
                top_bowling_feature: BowlingFeature::Short,
                mode: VectorMode::Profile,
                anchor_part: (0..12).map(|_| rng.random::<f64>()).collect(),
                top_part: (0..19).map(|_| rng.random::<f64>()).collect(),
            })
            .collect();
        let embedding = embed_tsne(&vectors, 1.5, 120, 5).unwrap();
        assert_eq!(embedding.entries.len(), 6);
        let csv = embedding.to_csv();
        assert!(csv.starts_with("player,polarity,bowling_feature,x,y\n"));
        assert_eq!(csv.lines().count(), 7);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("P0,strength,short,"));
        assert_eq!(embedding.entries[0].label(), "P0 - short");
    }
}
