//! Confrontation matrix construction.
//!
//! For every delivery the batting side is the structured outcome plus any
//! batting features matched in the text; the bowling side is the matched
//! bowling features. Each (batting, bowling) pair increments one cell, so a
//! record contributes |bat| x |bowl| counts. Counts stay integers end to
//! end; normalization happens only inside correspondence analysis.

use serde::{Deserialize, Serialize};

use crate::corpus::{CommentaryRecord, FilterTuple};
use crate::exec::{self, Execution};
use crate::lexicon::{parse_outcome, BattingFeature, BowlingFeature, FeatureLexicon};

pub const ROWS: usize = BattingFeature::COUNT;
pub const COLS: usize = BowlingFeature::COUNT;

/// 19x12 co-occurrence counts for one player under one filter tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfrontationMatrix {
    counts: Vec<u64>, // row-major ROWS x COLS
    pub filter: Option<FilterTuple>,
    pub records_used: u64,
    /// Records with an unknown outcome token or no matched bowling feature.
    pub records_skipped: u64,
}

impl ConfrontationMatrix {
    pub fn zero() -> Self {
        Self {
            counts: vec![0; ROWS * COLS],
            filter: None,
            records_used: 0,
            records_skipped: 0,
        }
    }

    /// Build a matrix from explicit row-major counts (fixtures, tests).
    pub fn from_counts(counts: [[u64; COLS]; ROWS]) -> Self {
        let mut m = Self::zero();
        for (i, row) in counts.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.counts[i * COLS + j] = v;
            }
        }
        m
    }

    pub fn get(&self, row: BattingFeature, col: BowlingFeature) -> u64 {
        self.counts[row.index() * COLS + col.index()]
    }

    pub fn get_index(&self, row: usize, col: usize) -> u64 {
        self.counts[row * COLS + col]
    }

    fn add_pair(&mut self, row: BattingFeature, col: BowlingFeature) {
        self.counts[row.index() * COLS + col.index()] += 1;
    }

    pub fn sum(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sums(&self) -> [u64; ROWS] {
        let mut sums = [0; ROWS];
        for (i, sum) in sums.iter_mut().enumerate() {
            *sum = self.counts[i * COLS..(i + 1) * COLS].iter().sum();
        }
        sums
    }

    pub fn col_sums(&self) -> [u64; COLS] {
        let mut sums = [0; COLS];
        for (idx, &v) in self.counts.iter().enumerate() {
            sums[idx % COLS] += v;
        }
        sums
    }

    /// Entrywise sum; merges partial matrices from parallel construction.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.records_used += other.records_used;
        self.records_skipped += other.records_skipped;
    }

    /// Multiply every count by `m` (scale-invariance checks).
    pub fn scaled(&self, m: u64) -> Self {
        let mut out = self.clone();
        for v in &mut out.counts {
            *v *= m;
        }
        out
    }

    /// Counts as a dense row-major float matrix for the numeric layers.
    pub fn to_dense(&self) -> Vec<f64> {
        self.counts.iter().map(|&v| v as f64).collect()
    }

    /// CSV with a bowling-feature header row and a batting-feature label
    /// column. Byte-stable for identical inputs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("batting");
        for &col in BowlingFeature::ALL {
            out.push(',');
            out.push_str(col.name());
        }
        out.push('\n');
        for &row in BattingFeature::ALL {
            out.push_str(row.name());
            for &col in BowlingFeature::ALL {
                out.push(',');
                out.push_str(&self.get(row, col).to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Feature sets extracted from one record by Algorithm 1's inner loop.
fn record_features(
    record: &CommentaryRecord,
    lexicon: &FeatureLexicon,
) -> Option<(Vec<BattingFeature>, Vec<BowlingFeature>)> {
    let outcome = parse_outcome(&record.outcome_token).ok()?;
    let (text_batting, bowling) = lexicon.match_text(&record.text);
    if bowling.is_empty() {
        return None;
    }
    let mut batting: Vec<BattingFeature> = text_batting.into_iter().collect();
    if !batting.contains(&outcome) {
        batting.push(outcome);
    }
    batting.sort_by_key(|f| f.index());
    let mut bowling: Vec<BowlingFeature> = bowling.into_iter().collect();
    bowling.sort_by_key(|f| f.index());
    Some((batting, bowling))
}

/// Build the confrontation matrix for a filtered record sequence.
pub fn build_matrix(records: &[CommentaryRecord], lexicon: &FeatureLexicon) -> ConfrontationMatrix {
    build_matrix_with(records, lexicon, Execution::default())
}

/// As [`build_matrix`], with an explicit execution mode. Partial matrices
/// are summed entrywise, so the parallel result is identical to sequential.
pub fn build_matrix_with(
    records: &[CommentaryRecord],
    lexicon: &FeatureLexicon,
    exec: Execution,
) -> ConfrontationMatrix {
    let extracted = exec::map_slice(exec, records, |record| record_features(record, lexicon));
    let mut matrix = ConfrontationMatrix::zero();
    for features in extracted {
        match features {
            Some((batting, bowling)) => {
                for &a in &batting {
                    for &b in &bowling {
                        matrix.add_pair(a, b);
                    }
                }
                matrix.records_used += 1;
            }
            None => matrix.records_skipped += 1,
        }
    }
    matrix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, SchemaVersion, SAMPLE_CORPUS_JSONL};
    use proptest::prelude::*;
    use std::io::Cursor;

    fn sample_records() -> Vec<CommentaryRecord> {
        ingest(Cursor::new(SAMPLE_CORPUS_JSONL), SchemaVersion::V1)
            .unwrap()
            .records()
            .to_vec()
    }

    #[test]
    fn worked_single_delivery_trace() {
        // "1 run" head, text matching good + move_in + beaten: exactly four
        // cells incremented.
        let records = vec![sample_records()[0].clone()];
        let lex = FeatureLexicon::bundled();
        let matrix = build_matrix(&records, &lex);
        assert_eq!(matrix.records_used, 1);
        assert_eq!(matrix.records_skipped, 0);
        assert_eq!(matrix.sum(), 4);
        for &(row, col) in &[
            (BattingFeature::Run1, BowlingFeature::Good),
            (BattingFeature::Run1, BowlingFeature::MoveIn),
            (BattingFeature::Beaten, BowlingFeature::Good),
            (BattingFeature::Beaten, BowlingFeature::MoveIn),
        ] {
            assert_eq!(matrix.get(row, col), 1, "cell ({row}, {col})");
        }
    }

    #[test]
    fn empty_sequence_gives_zero_matrix() {
        let lex = FeatureLexicon::bundled();
        let matrix = build_matrix(&[], &lex);
        assert_eq!(matrix.sum(), 0);
        assert_eq!(matrix.records_used, 0);
        assert_eq!(matrix.records_skipped, 0);
    }

    #[test]
    fn unknown_outcome_and_featureless_text_are_skipped() {
        let mut records = sample_records();
        records[1].outcome_token = "banana".into();
        records[2].text = "nothing to see here".into();
        let lex = FeatureLexicon::bundled();
        let matrix = build_matrix(&records, &lex);
        assert_eq!(matrix.records_used, 3);
        assert_eq!(matrix.records_skipped, 2);
        assert_eq!(
            matrix.records_used + matrix.records_skipped,
            records.len() as u64
        );
    }

    #[test]
    fn sums_concentrate_single_entry() {
        let mut counts = [[0u64; COLS]; ROWS];
        counts[3][7] = 5;
        let matrix = ConfrontationMatrix::from_counts(counts);
        assert_eq!(matrix.sum(), 5);
        assert_eq!(matrix.row_sums()[3], 5);
        assert_eq!(matrix.col_sums()[7], 5);
        assert_eq!(matrix.row_sums().iter().sum::<u64>(), 5);
    }

    #[test]
    fn zero_matrix_sums() {
        let matrix = ConfrontationMatrix::zero();
        assert_eq!(matrix.sum(), 0);
        assert!(matrix.row_sums().iter().all(|&v| v == 0));
        assert!(matrix.col_sums().iter().all(|&v| v == 0));
    }

    #[test]
    fn sum_matches_per_record_recount() {
        let lex = FeatureLexicon::bundled();
        let records = sample_records();
        let matrix = build_matrix(&records, &lex);
        let mut expected = 0u64;
        for record in &records {
            if let Some((bat, bowl)) = record_features(record, &lex) {
                expected += (bat.len() * bowl.len()) as u64;
            }
        }
        assert_eq!(matrix.sum(), expected);
    }

    #[test]
    fn csv_layout_and_stability() {
        let lex = FeatureLexicon::bundled();
        let records = vec![sample_records()[0].clone()];
        let matrix = build_matrix(&records, &lex);
        let csv = matrix.to_csv();
        assert_eq!(csv, matrix.to_csv());
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("batting,short,good,full"));
        assert_eq!(csv.lines().count(), 1 + ROWS);
        let run1_line = csv
            .lines()
            .find(|l| l.starts_with("run1,"))
            .expect("run1 row present");
        assert_eq!(run1_line, "run1,0,1,0,0,0,0,0,0,0,0,1,0");
    }

    #[test]
    fn parallel_build_matches_sequential() {
        let lex = FeatureLexicon::bundled();
        let spec = crate::corpus::synthetic::planted_response_spec("Abel");
        let records = crate::corpus::synthetic::generate_synthetic(&spec, 1000, 5).unwrap();
        let seq = build_matrix_with(&records, &lex, Execution::Sequential);
        let par = build_matrix_with(&records, &lex, Execution::Parallel);
        assert_eq!(seq, par);
    }

    proptest! {
        /// Record order never changes the matrix.
        #[test]
        fn permutation_invariance(seed in 0u64..500, swaps in proptest::collection::vec((0usize..50, 0usize..50), 0..40)) {
            let lex = FeatureLexicon::bundled();
            let spec = crate::corpus::synthetic::planted_response_spec("Abel");
            let mut records = crate::corpus::synthetic::generate_synthetic(&spec, 50, seed).unwrap();
            let base = build_matrix(&records, &lex);
            for (a, b) in swaps {
                records.swap(a, b);
            }
            let permuted = build_matrix(&records, &lex);
            prop_assert_eq!(base, permuted);
        }

        /// build(A ∪ B) = build(A) + build(B) entrywise.
        #[test]
        fn additivity(split in 0usize..80, seed in 0u64..500) {
            let lex = FeatureLexicon::bundled();
            let spec = crate::corpus::synthetic::planted_response_spec("Abel");
            let records = crate::corpus::synthetic::generate_synthetic(&spec, 80, seed).unwrap();
            let whole = build_matrix(&records, &lex);
            let mut left = build_matrix(&records[..split], &lex);
            let right = build_matrix(&records[split..], &lex);
            left.merge(&right);
            prop_assert_eq!(whole, left);
        }
    }
}
