use std::collections::HashSet;

use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};
use morphpiece::tokenizer::TokenizerConfig;
use morphpiece::{analysis, artifacts, bpe, fixtures};

fn training(c: &mut Criterion) {
    let docs = fixtures::corpus();
    let table = fixtures::morph_table();
    let exclusion = artifacts::exclusion_set(&table);
    let mut g = c.benchmark_group("train");
    g.sample_size(20);
    g.bench_function("bpe_fixture_1000", |b| b.iter(|| bpe::train(black_box(&docs), 1000, &exclusion).unwrap()));
    g.bench_function("bpe_fixture_no_exclusion", |b| b.iter(|| bpe::train(black_box(&docs), 1000, &HashSet::new()).unwrap()));
    g.finish();
}

fn round_trip(c: &mut Criterion) {
    let art = fixtures::artifacts();
    let tok = art.tokenizer(TokenizerConfig::default()).unwrap();
    let detok = art.detokenizer();
    let text = fixtures::CORPUS;
    let tokens = tok.tokenize(text);

    let mut g = c.benchmark_group("pipeline");
    g.throughput(Throughput::Bytes(text.len() as u64));
    g.bench_function("pretokenize", |b| b.iter(|| bpe::pretokenize(black_box(text))));
    g.bench_function("tokenize", |b| b.iter(|| tok.tokenize(black_box(text))));
    g.bench_function("encode_ids", |b| b.iter(|| tok.encode(black_box(text))));
    g.bench_function("detokenize", |b| b.iter(|| detok.detokenize(black_box(&tokens)).unwrap()));
    g.finish();
}

fn statistics(c: &mut Criterion) {
    let art = fixtures::artifacts();
    let tok = art.tokenizer(TokenizerConfig::default()).unwrap();
    let docs = fixtures::corpus();
    let mut g = c.benchmark_group("analysis");
    g.bench_function("coverage", |b| b.iter(|| analysis::coverage(black_box(&docs), &tok).unwrap()));
    g.bench_function("fertility", |b| {
        let mp = analysis::MorphPiece(&tok);
        b.iter(|| analysis::fertility(black_box(&docs), &[&analysis::Whitespace, &mp]).unwrap())
    });
    g.finish();
}

criterion_group!(benches, training, round_trip, statistics);
criterion_main!(benches);
