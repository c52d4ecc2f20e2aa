//! Synthetic corpora with a known relation between message text and
//! effort, used by benchmarks and end-to-end tests.
//!
//! Every message carries exactly one *level phrase*. The level `l` in
//! `0..=9` fixes each metric through `ln(1 + m) = a_m + b_m * l / 9 + e`
//! with `e ~ Normal(0, noise)`; the remaining words are neutral filler.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::churn::EffortVector;
use crate::dataset::DatasetRecord;
use crate::satd::{LabelSource, PatternSet, SatdClass, SatdLabel};
use crate::significance::SignificanceProfile;

/// Level phrases from lowest to highest effort. Both words of the top
/// phrase also occur in low-effort phrases, so only the bigram predicts it.
pub const LEVEL_PHRASES: [&str; 10] = [
    "typo",
    "refactor naming",
    "interface javadoc",
    "update comment",
    "logging",
    "simplify logic",
    "exception handling",
    "code cleanup",
    "new endpoint",
    "refactor interface",
];

pub const LOW_EFFORT_TOKEN: &str = "typo";
pub const HIGH_EFFORT_NGRAM: &str = "refactor interface";

const FILLER: [&str; 16] = [
    "in", "the", "for", "parser", "module", "client", "server", "cache", "config", "build", "core",
    "api", "util", "request", "handler", "service",
];

/// `(a, b)` per base metric: la, ld, fa, fd, fm, lcc, mcc, hcc, ccc.
const PLANT: [(f64, f64); 9] = [
    (0.5, 4.5),
    (0.3, 4.0),
    (0.0, 2.5),
    (0.0, 2.5),
    (0.2, 2.8),
    (0.3, 3.5),
    (0.0, 3.0),
    (0.0, 2.6),
    (0.0, 2.5),
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedOptions {
    pub n: usize,
    pub seed: u64,
    /// Standard deviation of the log-space noise.
    pub noise: f64,
}

impl Default for PlantedOptions {
    fn default() -> Self {
        Self {
            n: 5_000,
            seed: 0,
            noise: 0.1,
        }
    }
}

fn filler(rng: &mut ChaCha8Rng, count: usize) -> Vec<&'static str> {
    (0..count)
        .map(|_| *FILLER.choose(rng).expect("non-empty"))
        .collect()
}

/// Planted-signal dataset of `opts.n` records with rule-based labels.
pub fn planted_corpus(opts: &PlantedOptions) -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let noise = Normal::new(0.0, opts.noise.max(0.0)).expect("finite noise");
    let patterns = PatternSet::bundled();
    (0..opts.n)
        .map(|i| {
            let level = rng.random_range(0..LEVEL_PHRASES.len());
            let before = rng.random_range(0..=2);
            let after = rng.random_range(1..=3);
            let mut words = filler(&mut rng, before);
            words.push(LEVEL_PHRASES[level]);
            words.extend(filler(&mut rng, after));
            let message = words.join(" ");

            let x = level as f64 / 9.0;
            let mut m = [0u64; 9];
            for (slot, (a, b)) in m.iter_mut().zip(PLANT) {
                let z: f64 = a + b * x + noise.sample(&mut rng);
                *slot = z.exp_m1().max(0.0).round() as u64;
            }
            DatasetRecord {
                repo_id: "planted".into(),
                sha: format!("{:08x}{:032x}", i, rng.random::<u128>()),
                timestamp: 1_600_000_000 + i as i64,
                label: patterns.detect(&message),
                message,
                effort: EffortVector::new(m[0], m[1], m[2], m[3], m[4]),
                significance: SignificanceProfile::new(m[5], m[6], m[7], m[8]),
            }
        })
        .collect()
}

/// Five classes with disjoint vocabularies, balanced.
pub fn planted_satd_corpus(n: usize, seed: u64) -> Vec<(String, SatdLabel)> {
    const WORDS: [[&str; 4]; 5] = [
        ["bump", "release", "version", "merge"],
        ["hack", "workaround", "kludge", "fixme"],
        ["javadoc", "readme", "spelling", "docs"],
        ["wip", "unimplemented", "feature", "requirement"],
        ["tests", "coverage", "assertions", "junit"],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let class = SatdClass::ALL[i % 5];
            let before = rng.random_range(0..=2);
            let mut words = filler(&mut rng, before);
            words.push(WORDS[i % 5].choose(&mut rng).expect("non-empty"));
            words.push(WORDS[i % 5].choose(&mut rng).expect("non-empty"));
            let after = rng.random_range(0..=2);
            words.extend(filler(&mut rng, after));
            (words.join(" "), class.to_label(LabelSource::Rule))
        })
        .collect()
}
