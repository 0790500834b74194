//! Sequential vs rayon paths for the data-parallel hot spots: corpus line
//! parsing, confrontation-matrix accumulation, and the t-SNE pair sums.
//!
//! Run with `cargo bench -p crease-core`. Both paths produce bit-identical
//! results (asserted in the unit tests); these benches measure the speedup.

use std::hint::black_box;
use std::io::Cursor;

use criterion::{criterion_group, criterion_main, Criterion};

use crease_core::confrontation::build_matrix_with;
use crease_core::corpus::synthetic::{generate_synthetic, planted_response_spec};
use crease_core::corpus::{ingest_with, SchemaVersion};
use crease_core::lexicon::FeatureLexicon;
use crease_core::similarity::{embed_points, TsneParams};
use crease_core::Execution;

fn corpus_jsonl(n: usize) -> String {
    let spec = planted_response_spec("Abel");
    let records = generate_synthetic(&spec, n, 7).unwrap();
    let mut out = String::new();
    for record in &records {
        out.push_str(&serde_json::to_string(record).unwrap());
        out.push('\n');
    }
    out
}

fn bench_ingest(c: &mut Criterion) {
    let jsonl = corpus_jsonl(20_000);
    let mut group = c.benchmark_group("ingest_20k_lines");
    group.bench_function("sequential", |b| {
        b.iter(|| {
            ingest_with(
                Cursor::new(black_box(&jsonl)),
                SchemaVersion::V1,
                Execution::Sequential,
            )
            .unwrap()
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            ingest_with(
                Cursor::new(black_box(&jsonl)),
                SchemaVersion::V1,
                Execution::Parallel,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_build_matrix(c: &mut Criterion) {
    let spec = planted_response_spec("Abel");
    let records = generate_synthetic(&spec, 20_000, 7).unwrap();
    let lexicon = FeatureLexicon::bundled();
    let mut group = c.benchmark_group("build_matrix_20k_records");
    group.bench_function("sequential", |b| {
        b.iter(|| build_matrix_with(black_box(&records), &lexicon, Execution::Sequential))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| build_matrix_with(black_box(&records), &lexicon, Execution::Parallel))
    });
    group.finish();
}

fn bench_tsne(c: &mut Criterion) {
    // 240 random 31-dimensional points, the scale of an all-batsmen run.
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let points: Vec<Vec<f64>> = (0..240)
        .map(|_| (0..31).map(|_| rng.random::<f64>()).collect())
        .collect();

    let mut group = c.benchmark_group("tsne_240_points_100_iters");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let params = TsneParams {
            perplexity: 30.0,
            iterations: 100,
            seed: 5,
            exec,
            ..TsneParams::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| embed_points(black_box(&points), &params).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ingest, bench_build_matrix, bench_tsne);
criterion_main!(benches);
