mod common;

use std::fs;

use common::*;
use presti_core::synth::{planted_corpus, PlantedOptions};
use presti_core::DebtType;

#[test]
fn mine_keeps_three_of_five_commits() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("shop");
    five_commit_repo(&repo);
    let out = tmp.path().join("d.jsonl");
    let run = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let records = read_jsonl(&out);
    let messages: Vec<&str> = records.iter().map(|r| r.message.as_str()).collect();
    assert_eq!(messages.len(), 3, "{messages:?}");
    assert!(records.iter().all(|r| r.repo_id == "shop"));

    let hack = records
        .iter()
        .find(|r| r.message.starts_with("TODO"))
        .unwrap();
    assert_eq!(hack.label.debt_type, Some(DebtType::CodeDesign));
    assert_eq!((hack.effort.la, hack.effort.ld, hack.effort.fm), (2, 1, 1));
    let typo = records.iter().find(|r| r.message.contains("typo")).unwrap();
    assert_eq!(typo.label.debt_type, Some(DebtType::Documentation));
    assert_eq!((typo.effort.fa, typo.effort.la), (1, 1));

    let validator = schema_validator("dataset_record.schema.json");
    for line in fs::read_to_string(&out).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(validator.is_valid(&v), "{line}");
    }

    let with_reverts = tmp.path().join("r.jsonl");
    let run = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--keep-reverts",
        "--out",
        with_reverts.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    assert_eq!(read_jsonl(&with_reverts).len(), 4);
}

#[test]
fn mining_is_byte_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("shop");
    five_commit_repo(&repo);
    let a = tmp.path().join("a.jsonl");
    let b = tmp.path().join("b.jsonl");
    for out in [&a, &b] {
        assert!(presti(&[
            "mine",
            repo.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn empty_and_missing_repositories_are_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    git2::Repository::init(&empty).unwrap();
    let run = presti(&["mine", empty.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr(&run).contains("no records"), "{}", stderr(&run));

    let run = presti(&["mine", tmp.path().join("nope").to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn one_bad_repository_does_not_stop_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("shop");
    five_commit_repo(&repo);
    let out = tmp.path().join("d.jsonl");
    let run = presti(&[
        "mine",
        tmp.path().join("missing").to_str().unwrap(),
        repo.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    assert_eq!(read_jsonl(&out).len(), 3);
}

#[test]
fn custom_patterns_replace_bundled_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = tmp.path().join("shop");
    five_commit_repo(&repo);
    let patterns = tmp.path().join("p.tsv");
    fs::write(&patterns, "# only one rule\ntest\treadme\n").unwrap();
    let out = tmp.path().join("d.jsonl");
    let run = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--patterns",
        patterns.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let records = read_jsonl(&out);
    let labels: Vec<Option<DebtType>> = records.iter().map(|r| r.label.debt_type).collect();
    assert_eq!(labels.iter().filter(|l| l.is_some()).count(), 1);
    assert!(labels.contains(&Some(DebtType::Test)));

    fs::write(&patterns, "no tab here\n").unwrap();
    let run = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--patterns",
        patterns.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(
        presti(&["train", "x.jsonl", "--out", "m.bin", "--split", "50/50"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        presti(&["train", "x.jsonl", "--out", "m.bin", "--targets", "loc"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(presti(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(presti(&["--help"]).status.code(), Some(0));
}

fn planted(dir: &std::path::Path, n: usize) -> std::path::PathBuf {
    let path = dir.join("planted.jsonl");
    write_jsonl(
        &path,
        &planted_corpus(&PlantedOptions {
            n,
            seed: 3,
            ..Default::default()
        }),
    );
    path
}

#[test]
fn stats_renders_all_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let data = planted(tmp.path(), 300);
    let d = data.to_str().unwrap();
    let text = presti(&["stats", d]);
    assert!(text.status.success(), "{}", stderr(&text));
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("SATD vs non-SATD") && text.contains("SATD by debt type"));
    assert!(text.contains("LA") && text.contains("CCC"));

    let csv = String::from_utf8(presti(&["stats", d, "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("section,metric,"));
    let json: serde_json::Value =
        serde_json::from_slice(&presti(&["stats", d, "--format", "json"]).stdout).unwrap();
    assert_eq!(json["sections"].as_array().unwrap().len(), 2);

    let empty = tmp.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert_eq!(
        presti(&["stats", empty.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn train_evaluate_report_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let data = planted(tmp.path(), 400);
    let d = data.to_str().unwrap();
    let model = tmp.path().join("m.bin");
    let m = model.to_str().unwrap();
    let train = [
        "train",
        d,
        "--out",
        m,
        "--seed",
        "9",
        "--targets",
        "la,fm",
        "--models",
        "baseline,ridge,textcnn",
        "--embed-dim",
        "8",
        "--filters",
        "4",
        "--windows",
        "1,2",
        "--epochs",
        "2",
    ];
    let run = presti(&train);
    assert!(run.status.success(), "{}", stderr(&run));

    let report = tmp.path().join("report.json");
    let run = presti(&[
        "evaluate",
        d,
        "--model",
        m,
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let validator = schema_validator("evaluation_report.schema.json");
    let errors: Vec<String> = validator
        .iter_errors(&json)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}");
    assert_eq!(json["n"], 40);
    assert_eq!(json["targets"], serde_json::json!(["la", "fm"]));

    let table = presti(&["report", report.to_str().unwrap()]);
    assert!(table.status.success());
    let table = String::from_utf8(table.stdout).unwrap();
    assert!(table.contains("ridge") && table.contains("FM"));

    let kw = presti(&[
        "keywords", d, "--model", m, "--target", "fm", "--top", "3", "--format", "json",
    ]);
    assert!(kw.status.success(), "{}", stderr(&kw));
    let kw: serde_json::Value = serde_json::from_slice(&kw.stdout).unwrap();
    assert_eq!(kw[0]["entries"].as_array().unwrap().len(), 3);
    let missing = presti(&["keywords", d, "--model", m, "--target", "ld"]);
    assert_eq!(missing.status.code(), Some(2));

    // Same inputs, same bytes.
    let model2 = tmp.path().join("m2.bin");
    let mut again = train;
    again[3] = model2.to_str().unwrap();
    assert!(presti(&again).status.success());
    assert_eq!(fs::read(&model).unwrap(), fs::read(&model2).unwrap());
    let report2 = tmp.path().join("report2.json");
    presti(&[
        "evaluate",
        d,
        "--model",
        m,
        "--out",
        report2.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&report).unwrap(), fs::read(&report2).unwrap());

    // A bundle is tied to the dataset it was trained on.
    let other = tmp.path().join("other.jsonl");
    write_jsonl(&other, &read_jsonl(&data)[..200]);
    assert_eq!(
        presti(&["evaluate", other.to_str().unwrap(), "--model", m])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn classifier_labels_can_replace_rules() {
    let tmp = tempfile::tempdir().unwrap();
    let data = planted(tmp.path(), 300);
    let model = tmp.path().join("satd.bin");
    let run = presti(&[
        "train-satd",
        data.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--embed-dim",
        "8",
        "--filters",
        "4",
        "--windows",
        "1,2",
        "--epochs",
        "3",
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    let repo = tmp.path().join("shop");
    five_commit_repo(&repo);
    let out = tmp.path().join("d.jsonl");
    let run = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--satd-model",
        model.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    assert!(read_jsonl(&out)
        .iter()
        .all(|r| r.label.source == presti_core::satd::LabelSource::Model));
    // An effort bundle is not a classifier.
    let wrong = presti(&[
        "mine",
        repo.to_str().unwrap(),
        "--satd-model",
        data.to_str().unwrap(),
    ]);
    assert_eq!(wrong.status.code(), Some(2));
}
