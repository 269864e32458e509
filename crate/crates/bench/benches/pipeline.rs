use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use oculomotor::dispersion::entropies;
use oculomotor::ingest::{parse_reader, write_recording};
use oculomotor::pipeline::{extract_features, PipelineConfig};
use oculomotor::stats::{run_report, StatsConfig};
use oculomotor::{Condition, ScreenGeometry};
use oculomotor_bench::{cohort_rows, recording};

fn extract(c: &mut Criterion) {
    let cfg = PipelineConfig::default();
    let mut g = c.benchmark_group("extract");
    g.sample_size(10);
    for minutes in [2.0, 15.0] {
        let rec = recording(60.0 * minutes, 1);
        g.bench_function(format!("{minutes} min"), |b| {
            b.iter(|| extract_features(&rec, &cfg).unwrap())
        });
    }
    g.finish();
}

fn parse(c: &mut Criterion) {
    let geometry = ScreenGeometry::default();
    let rec = recording(900.0, 2);
    let mut csv = Vec::new();
    write_recording(&rec, &geometry, &mut csv).unwrap();
    let mut g = c.benchmark_group("ingest");
    g.sample_size(10);
    g.bench_function("parse 15 min", |b| {
        b.iter(|| parse_reader(csv.as_slice(), "S01", Condition::Baseline, &geometry, 100.0).unwrap())
    });
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let rec = recording(300.0, 3);
    let (x, _) = rec.valid_gaze();
    c.bench_function("entropies 5 min", |b| b.iter(|| entropies(&x, 2, 0.2).unwrap()));
}

fn stats(c: &mut Criterion) {
    let rows = cohort_rows(24, 20.0, 4);
    let cfg = StatsConfig::default();
    c.bench_function("run_report 24 subjects", |b| {
        b.iter_batched(|| rows.clone(), |r| run_report(&r, &cfg).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group!(benches, extract, parse, entropy, stats);
criterion_main!(benches);
