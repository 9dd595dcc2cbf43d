use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use patrec_bench::{noise_sample, two_tone_sample};
use patrec_core::features::{self, fft, FeatureConfig};
use patrec_core::nlp::{identify_language, Estimator, NGramModel, TokenizerOptions};
use patrec_core::parsing::{compile_grammar, cyk_parse, BASIC_GRAMMAR};
use patrec_core::preprocess::{fft_filter, FrequencyResponse};

fn bench_fft(c: &mut Criterion) {
    let base = noise_sample(1024, 7);
    c.bench_function("fft_1024", |b| {
        b.iter(|| {
            let mut re = base.amplitudes.clone();
            let mut im = vec![0.0; 1024];
            fft::fft(&mut re, &mut im).unwrap();
            black_box(re[0])
        })
    });
}

fn bench_fft_filter(c: &mut Criterion) {
    let sample = two_tone_sample(500.0, 2900.0);
    let response = FrequencyResponse::low_pass(1024, 8000);
    c.bench_function("fft_filter_low_pass_1s", |b| {
        b.iter(|| black_box(fft_filter(&sample, &response, 1024).unwrap().len()))
    });
}

fn bench_lpc(c: &mut Criterion) {
    let window = noise_sample(128, 11);
    c.bench_function("lpc_order20_window128", |b| {
        b.iter(|| {
            let (a, _) = features::lpc_coefficients(&window.amplitudes, 20).unwrap();
            black_box(a[0])
        })
    });
}

fn bench_fft_features(c: &mut Criterion) {
    let sample = two_tone_sample(700.0, 1900.0);
    let cfg = FeatureConfig::default();
    c.bench_function("extract_fft_1s", |b| {
        b.iter(|| black_box(features::extract_fft(&sample, &cfg).unwrap().len()))
    });
}

fn bench_cyk(c: &mut Criterion) {
    let grammar = compile_grammar(BASIC_GRAMMAR).unwrap();
    let sentence: Vec<String> = "my rabbit has a white smile"
        .split_whitespace()
        .map(str::to_string)
        .collect();
    c.bench_function("cyk_basic_grammar_6_words", |b| {
        b.iter(|| {
            let chart = cyk_parse(&grammar, &sentence).unwrap().unwrap();
            black_box(chart.sentence_probability())
        })
    });
}

fn bench_language_id(c: &mut Criterion) {
    let opts = TokenizerOptions::default();
    let corpus_a = "the quick brown fox jumps over the lazy dog ".repeat(50);
    let corpus_b = "le renard brun saute par dessus le chien paresseux ".repeat(50);
    let mut a = NGramModel::new(2, "a").unwrap();
    a.train(&corpus_a, &opts);
    let mut b_model = NGramModel::new(2, "b").unwrap();
    b_model.train(&corpus_b, &opts);
    let models = [a, b_model];
    c.bench_function("identify_language_bigram", |b| {
        b.iter(|| {
            let ranked =
                identify_language(&models, "the dog jumps over", &opts, Estimator::AddDelta(0.5))
                    .unwrap();
            black_box(ranked[0].1)
        })
    });
}

criterion_group!(
    benches,
    bench_fft,
    bench_fft_filter,
    bench_lpc,
    bench_fft_features,
    bench_cyk,
    bench_language_id
);
criterion_main!(benches);
