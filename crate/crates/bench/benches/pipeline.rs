use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use presti_core::features::TfidfVectorizer;
use presti_core::miner::{CommitRecord, FileDiff, FileStatus};
use presti_core::models::{ridge_fit, textcnn_fit, CnnHyper};
use presti_core::synth::{planted_corpus, PlantedOptions};
use presti_core::{
    compute_churn, mann_whitney, profile_commit, scott_knott_esd, transform_target, DatasetRecord,
    Target,
};

fn corpus(n: usize) -> Vec<DatasetRecord> {
    planted_corpus(&PlantedOptions {
        n,
        seed: 1,
        ..Default::default()
    })
}

fn java_commit() -> CommitRecord {
    let old: String = (0..200)
        .map(|i| format!("    int f{i}(int x) {{ return x + {i}; }}\n"))
        .collect();
    let old = format!("class A {{\n{old}}}\n");
    let new = old
        .replace("return x + 7;", "return x * 7;")
        .replace("f9(", "g9(");
    CommitRecord {
        repo_id: "bench".into(),
        sha: "0".repeat(40),
        parent_count: 1,
        timestamp: 0,
        message: "fix".into(),
        files: vec![FileDiff {
            path: "A.java".into(),
            status: FileStatus::Modified,
            added_lines: vec!["x".into(); 2],
            deleted_lines: vec!["y".into(); 2],
            old_text: Some(old),
            new_text: Some(new),
        }],
    }
}

fn features(c: &mut Criterion) {
    let records = corpus(2_000);
    let messages: Vec<&str> = records.iter().map(|r| r.message.as_str()).collect();
    c.bench_function("tfidf_fit_transform_2000", |b| {
        b.iter(|| {
            let v = TfidfVectorizer::fit(black_box(&messages)).unwrap();
            v.transform_all(&messages)
        })
    });
}

fn models(c: &mut Criterion) {
    let records = corpus(2_000);
    let messages: Vec<&str> = records.iter().map(|r| r.message.as_str()).collect();
    let y: Vec<f64> = records
        .iter()
        .map(|r| transform_target(r.target(Target::La)).unwrap())
        .collect();
    let x = TfidfVectorizer::fit(&messages)
        .unwrap()
        .transform_all(&messages);
    c.bench_function("ridge_fit_2000", |b| {
        b.iter(|| ridge_fit(black_box(&x), &y, 1.0).unwrap())
    });

    let hyper = CnnHyper {
        embed_dim: 16,
        window_sizes: vec![1, 2, 3],
        filters_per_window: 8,
        epochs: 1,
        batch_size: 32,
        ..CnnHyper::default()
    };
    let mut group = c.benchmark_group("textcnn");
    group.sample_size(10);
    group.bench_function("one_epoch_2000", |b| {
        b.iter(|| textcnn_fit(black_box(&messages), &y, None, &hyper).unwrap())
    });
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let commit = java_commit();
    c.bench_function("churn", |b| b.iter(|| compute_churn(black_box(&commit))));
    c.bench_function("significance_profile", |b| {
        b.iter(|| profile_commit(black_box(&commit)))
    });
}

fn statistics(c: &mut Criterion) {
    let records = corpus(5_000);
    let (satd, other): (Vec<_>, Vec<_>) = records.iter().partition(|r| r.label.debt_type.is_some());
    let a: Vec<f64> = satd.iter().map(|r| r.target(Target::La)).collect();
    let b_: Vec<f64> = other.iter().map(|r| r.target(Target::La)).collect();
    c.bench_function("mann_whitney_5000", |b| {
        b.iter(|| mann_whitney(black_box(&a), &b_).unwrap())
    });

    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &records {
        let key = r
            .label
            .debt_type
            .map_or("none".to_string(), |d| format!("{d:?}"));
        groups.entry(key).or_default().push(r.target(Target::La));
    }
    c.bench_function("scott_knott_esd_5000", |b| {
        b.iter(|| scott_knott_esd(black_box(&groups)).unwrap())
    });
}

criterion_group!(benches, features, models, metrics, statistics);
criterion_main!(benches);
