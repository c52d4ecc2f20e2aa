use std::collections::HashSet;
use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use presti_core::miner::{walk_repository, MinerOptions};
use presti_core::models::persist::{self, ArtifactKind};
use presti_core::models::ForestParams;
use presti_core::pipeline::{self, ModelBundle, PipelineError, TrainConfig};
use presti_core::report::{EvaluationReport, TableFormat, REPORT_SCHEMA_VERSION};
use presti_core::satd::{model_detect, train_satd_classifier, SatdModel};
use presti_core::tables::compare_groups;
use presti_core::{
    read_dataset, write_dataset, Approach, CnnHyper, DatasetRecord, PatternSet, Target,
};
use rayon::prelude::*;

use crate::{
    EvaluateArgs, Format, Hyper, KeywordsArgs, MineArgs, ReportArgs, StatsArgs, TrainArgs,
    TrainSatdArgs,
};

pub const USAGE: u8 = 1;
pub const DATA: u8 = 2;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

type Outcome = Result<(), Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure {
        code: USAGE,
        error: e.into(),
    }
}

fn data<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure {
        code: DATA,
        error: e.into(),
    }
}

fn data_at<E: Display + Send + Sync + 'static>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| data(anyhow!("{}: {e}", path.display()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(data_at(path)),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(data),
    }
}

fn load_records(path: &Path) -> Result<Vec<DatasetRecord>, Failure> {
    let file = File::open(path).map_err(data_at(path))?;
    let records = read_dataset(BufReader::new(file)).map_err(data_at(path))?;
    if records.is_empty() {
        return Err(data(anyhow!("{}: dataset is empty", path.display())));
    }
    Ok(records)
}

fn table_format(format: Format) -> TableFormat {
    match format {
        Format::Csv => TableFormat::Csv,
        _ => TableFormat::Text,
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cnn_hyper(h: &Hyper, seed: u64) -> CnnHyper {
    CnnHyper {
        embed_dim: h.embed_dim,
        window_sizes: h.windows.clone(),
        filters_per_window: h.filters,
        dropout: h.dropout,
        learning_rate: h.learning_rate,
        epochs: h.epochs,
        batch_size: h.batch_size,
        seed,
        ..CnnHyper::default()
    }
}

enum Labeler {
    Rules(PatternSet),
    Model(Box<SatdModel>),
}

fn mine_repo(
    path: &Path,
    opts: &MinerOptions,
    labeler: &Labeler,
) -> anyhow::Result<Vec<DatasetRecord>> {
    let mut walker = walk_repository(path, opts.clone())?;
    let patterns = match labeler {
        Labeler::Rules(p) => p,
        Labeler::Model(_) => PatternSet::bundled(),
    };
    let mut records = Vec::new();
    for commit in walker.by_ref() {
        let (mut record, degraded) = DatasetRecord::from_commit(&commit, patterns);
        for file in degraded {
            log::warn!(
                "{}@{}: could not parse {file}; left out of significance counts",
                record.repo_id,
                record.sha
            );
        }
        if let Labeler::Model(model) = labeler {
            record.label = model_detect(model, &record.message);
        }
        records.push(record);
    }
    for w in walker.warnings() {
        log::warn!("{}: {w}", path.display());
    }
    Ok(records)
}

pub fn mine(args: &MineArgs) -> Outcome {
    let labeler = match (&args.patterns, &args.satd_model) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(data_at(path))?;
            Labeler::Rules(PatternSet::parse(&text).map_err(data_at(path))?)
        }
        (None, Some(path)) => Labeler::Model(Box::new(
            persist::load(path, ArtifactKind::Satd).map_err(data_at(path))?,
        )),
        (None, None) => Labeler::Rules(PatternSet::bundled().clone()),
    };
    let opts = MinerOptions {
        branch: args.branch.clone(),
        max_commits: args.max_commits,
        keep_non_english: args.keep_non_english,
        keep_reverts: args.keep_reverts,
    };
    let per_repo: Vec<_> = args
        .repos
        .par_iter()
        .map(|path| (path, mine_repo(path, &opts, &labeler)))
        .collect();

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (path, result) in per_repo {
        match result {
            Ok(mined) => {
                log::info!("{}: {} records", path.display(), mined.len());
                for r in mined {
                    if seen.insert((r.repo_id.clone(), r.sha.clone())) {
                        records.push(r);
                    } else {
                        log::warn!(
                            "{}: duplicate record {}@{} skipped",
                            path.display(),
                            r.repo_id,
                            r.sha
                        );
                    }
                }
            }
            Err(e) => log::error!("{}: {e}", path.display()),
        }
    }
    if records.is_empty() {
        return Err(data(anyhow!("no records mined")));
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(data_at(path))?;
            write_dataset(BufWriter::new(file), &records).map_err(data_at(path))
        }
        None => write_dataset(BufWriter::new(io::stdout().lock()), &records).map_err(data),
    }
}

pub fn stats(args: &StatsArgs) -> Outcome {
    let records = load_records(&args.dataset)?;
    let tables = compare_groups(&records).map_err(data)?;
    let text = match args.format {
        Format::Json => json(&tables),
        f => tables.render(table_format(f)),
    };
    emit(args.out.as_ref(), &text)
}

fn pipeline_failure(e: PipelineError) -> Failure {
    match e {
        PipelineError::Config(_) => usage(e),
        _ => data(e),
    }
}

pub fn train(args: &TrainArgs) -> Outcome {
    let records = load_records(&args.dataset)?;
    let config = TrainConfig {
        seed: args.seed,
        split: args.split,
        approaches: if args.models.is_empty() {
            Approach::ALL.to_vec()
        } else {
            args.models.clone()
        },
        targets: if args.targets.is_empty() {
            Target::ALL.to_vec()
        } else {
            args.targets.clone()
        },
        cnn: cnn_hyper(&args.hyper, args.seed),
        forest: ForestParams {
            trees: args.hyper.trees,
            seed: args.seed,
            ..ForestParams::default()
        },
        ridge_lambda: args.hyper.lambda,
    };
    let bundle = pipeline::train(&records, &config).map_err(pipeline_failure)?;
    persist::save(&args.out, ArtifactKind::Effort, &bundle).map_err(data)
}

fn load_bundle(path: &Path) -> Result<ModelBundle, Failure> {
    persist::load(path, ArtifactKind::Effort).map_err(data_at(path))
}

pub fn evaluate(args: &EvaluateArgs) -> Outcome {
    let records = load_records(&args.dataset)?;
    let bundle = load_bundle(&args.model)?;
    let report = pipeline::evaluate(&records, &bundle).map_err(pipeline_failure)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        f => report.render(table_format(f)),
    };
    emit(args.out.as_ref(), &text)
}

pub fn keywords(args: &KeywordsArgs) -> Outcome {
    let records = load_records(&args.dataset)?;
    let bundle = load_bundle(&args.model)?;
    let messages: Vec<&str> = records.iter().map(|r| r.message.as_str()).collect();
    let reports =
        pipeline::keywords(&bundle, &messages, args.target, args.top).map_err(pipeline_failure)?;
    let text = match args.format {
        Format::Json => json(&reports),
        Format::Text => format!("{}\n{}", reports[0].to_table(), reports[1].to_table()),
        Format::Csv => {
            let mut out = String::from("direction,rank,ngram,n,score,count\n");
            for r in &reports {
                for (i, e) in r.entries.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.direction,
                        i + 1,
                        e.ngram,
                        e.n,
                        e.score,
                        e.count
                    ));
                }
            }
            out
        }
    };
    emit(args.out.as_ref(), &text)
}

pub fn report(args: &ReportArgs) -> Outcome {
    let text = fs::read_to_string(&args.report).map_err(data_at(&args.report))?;
    let report: EvaluationReport = serde_json::from_str(&text).map_err(data_at(&args.report))?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(data(anyhow!(
            "{}: schema version {} is not supported",
            args.report.display(),
            report.schema_version
        )));
    }
    let text = match args.format {
        Format::Json => report.to_json(),
        f => report.render(table_format(f)),
    };
    emit(args.out.as_ref(), &text)
}

pub fn train_satd(args: &TrainSatdArgs) -> Outcome {
    let records = load_records(&args.dataset)?;
    let corpus: Vec<(&str, _)> = records
        .iter()
        .map(|r| (r.message.as_str(), r.label))
        .collect();
    let hyper = cnn_hyper(&args.hyper, args.seed);
    hyper.validate().map_err(usage)?;
    let model = train_satd_classifier(&corpus, &hyper)
        .with_context(|| format!("training on {}", args.dataset.display()))
        .map_err(data)?;
    persist::save(&args.out, ArtifactKind::Satd, &model).map_err(data)
}
