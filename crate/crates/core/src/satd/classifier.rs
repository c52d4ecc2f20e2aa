use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DebtType, LabelSource, SatdLabel};
use crate::features::{tokenize, Vocabulary, PAD};
use crate::models::textcnn::{encode_messages, train_network, Objective};
use crate::models::{CnnHyper, ConvNet, ModelError, TrainLog};

/// Output classes in tie-breaking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SatdClass {
    NonSatd,
    CodeDesign,
    Documentation,
    Requirement,
    Test,
}

impl SatdClass {
    pub const ALL: [SatdClass; 5] = [
        SatdClass::NonSatd,
        SatdClass::CodeDesign,
        SatdClass::Documentation,
        SatdClass::Requirement,
        SatdClass::Test,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_label(label: &SatdLabel) -> Self {
        match label.debt_type {
            None => SatdClass::NonSatd,
            Some(DebtType::CodeDesign) => SatdClass::CodeDesign,
            Some(DebtType::Documentation) => SatdClass::Documentation,
            Some(DebtType::Requirement) => SatdClass::Requirement,
            Some(DebtType::Test) => SatdClass::Test,
        }
    }

    pub fn to_label(self, source: LabelSource) -> SatdLabel {
        match self {
            SatdClass::NonSatd => SatdLabel::not_satd(source),
            SatdClass::CodeDesign => SatdLabel::satd(DebtType::CodeDesign, source),
            SatdClass::Documentation => SatdLabel::satd(DebtType::Documentation, source),
            SatdClass::Requirement => SatdLabel::satd(DebtType::Requirement, source),
            SatdClass::Test => SatdLabel::satd(DebtType::Test, source),
        }
    }
}

/// Five-way TextCNN classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatdModel {
    pub hyper: CnnHyper,
    pub vocab: Vocabulary,
    pub net: ConvNet,
    pub log: TrainLog,
}

impl SatdModel {
    fn encode(&self, message: &str) -> Vec<u32> {
        let mut seq = encode_messages(&[message], &self.vocab, self.hyper.max_len).remove(0);
        if seq.len() < self.net.max_window() {
            seq.resize(self.net.max_window(), PAD);
        }
        seq
    }

    /// Raw class scores in [`SatdClass::ALL`] order.
    pub fn scores(&self, message: &str) -> Vec<f64> {
        self.net.forward(&self.encode(message)).output
    }
}

pub fn train_satd_classifier<S: AsRef<str>>(
    corpus: &[(S, SatdLabel)],
    hyper: &CnnHyper,
) -> Result<SatdModel, ModelError> {
    hyper.validate()?;
    if corpus.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let classes: Vec<usize> = corpus
        .iter()
        .map(|(_, l)| SatdClass::from_label(l).index())
        .collect();
    if classes.iter().all(|c| *c == classes[0]) {
        return Err(ModelError::DegenerateCorpus);
    }
    let tokens: Vec<Vec<String>> = corpus.iter().map(|(m, _)| tokenize(m.as_ref())).collect();
    let vocab = Vocabulary::build(&tokens, hyper.min_freq);
    let mut net = ConvNet::new(
        vocab.len(),
        hyper.embed_dim,
        hyper.window_sizes.clone(),
        hyper.filters_per_window,
        SatdClass::ALL.len(),
    );
    net.initialize(&mut ChaCha8Rng::seed_from_u64(hyper.seed));
    // Class priors as the starting bias.
    for (k, b) in net.output_bias_mut().iter_mut().enumerate() {
        let count = classes.iter().filter(|c| **c == k).count() as f64;
        *b = ((count + 1.0) / (classes.len() as f64 + 5.0)).ln();
    }
    let mut model = SatdModel {
        hyper: hyper.clone(),
        vocab,
        net,
        log: TrainLog::default(),
    };
    let seqs: Vec<Vec<u32>> = corpus
        .iter()
        .map(|(m, _)| model.encode(m.as_ref()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(1));
    model.log = train_network(
        &mut model.net,
        &seqs,
        Objective::Classification(&classes),
        None,
        hyper,
        &mut rng,
    )?;
    Ok(model)
}

/// Argmax over class scores, first class wins ties. A message with no
/// tokens is never SATD.
pub fn model_detect(model: &SatdModel, message: &str) -> SatdLabel {
    if tokenize(message).is_empty() {
        return SatdLabel::not_satd(LabelSource::Model);
    }
    let scores = model.scores(message);
    let mut best = 0;
    for (k, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = k;
        }
    }
    SatdClass::ALL[best].to_label(LabelSource::Model)
}
