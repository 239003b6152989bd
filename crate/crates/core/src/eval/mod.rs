// Copyright 2026 The socialtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Offline evaluation: splits, query formation, metrics and reports.

mod metrics;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Query, TagDatabase, TagId, Tagset, Transaction};
use crate::recommend::{Method, RecommenderConfig};
use crate::social::{
    answer_queries, build_uk, BatchPolicy, Fallback, PipelineError, PipelineOptions,
    SourceSelection,
};

pub use metrics::{is_ranking, score, QueryScore, DEFAULT_RANKS};
pub use report::{emit_report, parse_tsv, MetricsReport, ReportFormat};

use metrics::MetricSums;

pub const CV_FOLDS: usize = 5;
pub const HOLDOUT_REPEATS: usize = 5;
pub const HOLDOUT_TEST_FRACTION: f64 = 0.4;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("cannot split {n} transactions into {needed} folds")]
    Degenerate { n: usize, needed: usize },
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: PipelineError,
    },
    #[error("invalid evaluation config: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Five-fold cross-validation.
    #[default]
    Cv5,
    /// Five independent random 40% test / 60% train splits.
    Holdout40,
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::Cv5 => "cv5",
            SplitMode::Holdout40 => "holdout40",
        })
    }
}

impl FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cv5" => Ok(SplitMode::Cv5),
            "holdout40" => Ok(SplitMode::Holdout40),
            _ => Err(format!("unknown split `{s}` (expected cv5 or holdout40)")),
        }
    }
}

/// How the `k` input tags of a test transaction are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputStrategy {
    #[default]
    Uniform,
    /// The `k` tags most frequent in training, ties to the lower id.
    MostFrequentFirst,
}

impl fmt::Display for InputStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputStrategy::Uniform => "uniform",
            InputStrategy::MostFrequentFirst => "most-frequent-first",
        })
    }
}

impl FromStr for InputStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(InputStrategy::Uniform),
            "most-frequent-first" => Ok(InputStrategy::MostFrequentFirst),
            _ => Err(format!("unknown input strategy `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub k: usize,
    pub split: SplitMode,
    pub seed: u64,
    pub ranks: Vec<usize>,
    pub recommender: RecommenderConfig,
    pub source: SourceSelection,
    pub strategy: InputStrategy,
    pub batch_policy: BatchPolicy,
    pub fallback: Fallback,
    pub min_group_transactions: usize,
    /// Friendship degree of the user-centered database that `frac_uk` is measured against.
    pub uk_degree: usize,
}

impl EvalConfig {
    pub fn new(k: usize, method: Method, source: SourceSelection) -> Self {
        EvalConfig {
            k,
            split: SplitMode::Cv5,
            seed: 0,
            ranks: DEFAULT_RANKS.to_vec(),
            recommender: RecommenderConfig::new(method),
            source,
            strategy: InputStrategy::Uniform,
            // the whole test set of a fold forms one batch unless configured
            batch_policy: BatchPolicy::unbounded(),
            fallback: Fallback::default(),
            min_group_transactions: 1,
            uk_degree: 1,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.k == 0 {
            return Err(EvalError::Config("k must be at least 1".into()));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return Err(EvalError::Config("ranks must be non-empty and positive".into()));
        }
        if !self.ranks.windows(2).all(|w| w[0] < w[1]) {
            return Err(EvalError::Config("ranks must be strictly increasing".into()));
        }
        self.recommender
            .mining
            .validate()
            .and(self.recommender.ct_mining.validate())
            .map_err(|e| EvalError::Config(e.to_string()))
    }

    fn pipeline(&self) -> PipelineOptions {
        PipelineOptions {
            config: self.recommender.clone(),
            selection: self.source,
            policy: self.batch_policy,
            fallback: self.fallback,
            min_group_transactions: self.min_group_transactions,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fold {
    pub train: TagDatabase,
    pub test: TagDatabase,
}

fn shuffled_ids(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, n, n).into_vec()
}

/// Train/test splits of `db`, deterministic in `seed`.
pub fn split(db: &TagDatabase, mode: SplitMode, seed: u64) -> Result<Vec<Fold>, EvalError> {
    let n = db.len();
    let needed = match mode {
        SplitMode::Cv5 => CV_FOLDS,
        // smallest n with a non-empty train and test side
        SplitMode::Holdout40 => 2,
    };
    if n < needed {
        return Err(EvalError::Degenerate { n, needed });
    }
    let rows = db.transactions();
    let pick = |ids: &mut dyn Iterator<Item = usize>| {
        let mut keep = vec![false; n];
        ids.for_each(|i| keep[i] = true);
        let mut next = 0;
        let test = db.select(|_| {
            next += 1;
            keep[next - 1]
        });
        let train = TagDatabase::new(
            db.vocabulary().clone(),
            rows.iter()
                .zip(&keep)
                .filter(|(_, k)| !**k)
                .map(|(t, _)| t.clone())
                .collect(),
        );
        Fold { train, test }
    };
    Ok(match mode {
        SplitMode::Cv5 => {
            let order = shuffled_ids(n, seed);
            (0..CV_FOLDS)
                .map(|f| {
                    let mut ids = order
                        .iter()
                        .enumerate()
                        .filter(|(pos, _)| pos % CV_FOLDS == f)
                        .map(|(_, &i)| i);
                    pick(&mut ids)
                })
                .collect()
        }
        SplitMode::Holdout40 => {
            let n_test = ((n as f64 * HOLDOUT_TEST_FRACTION).round() as usize).clamp(1, n - 1);
            (0..HOLDOUT_REPEATS)
                .map(|r| {
                    let order = shuffled_ids(n, mix(seed, r as u64));
                    pick(&mut order.into_iter().take(n_test))
                })
                .collect()
        }
    })
}

fn mix(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A query from `k` uniformly chosen tags of `txn`, with the rest as
/// ground truth. `None` when fewer than `k + 1` tags.
pub fn make_query(txn: &Transaction, k: usize, seed: u64) -> Option<(Query, Tagset)> {
    make_query_with(txn, k, InputStrategy::Uniform, seed, |_| 0)
}

pub fn make_query_with<F>(
    txn: &Transaction,
    k: usize,
    strategy: InputStrategy,
    seed: u64,
    train_support: F,
) -> Option<(Query, Tagset)>
where
    F: Fn(TagId) -> usize,
{
    let tags = txn.tags.as_slice();
    if tags.len() < k + 1 {
        return None;
    }
    let input: Tagset = match strategy {
        InputStrategy::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, u64::from(txn.id)));
            sample(&mut rng, tags.len(), k).iter().map(|i| tags[i]).collect()
        }
        InputStrategy::MostFrequentFirst => {
            let mut by_freq = tags.to_vec();
            by_freq.sort_by_key(|&t| (std::cmp::Reverse(train_support(t)), t));
            by_freq.into_iter().take(k).collect()
        }
    };
    let truth = txn.tags.difference(&input);
    let query = Query {
        user: txn.user,
        input,
        interest: txn.interest,
    };
    Some((query, truth))
}

#[derive(Default)]
struct FoldResult {
    sums: Option<MetricSums>,
    tagsets: f64,
    frac_uk: f64,
    frac_uk_n: usize,
    frac_ck: f64,
    time_ms: f64,
    skipped: usize,
    models_built: usize,
    batches: usize,
    fallbacks: usize,
}

fn run_fold(corpus: &Corpus, cfg: &EvalConfig, fold: &Fold, fold_seed: u64) -> Result<FoldResult, PipelineError> {
    let mut support = vec![0usize; fold.train.n_tags()];
    if cfg.strategy == InputStrategy::MostFrequentFirst {
        for t in fold.train.iter() {
            for tag in t.tags.iter() {
                support[tag as usize] += 1;
            }
        }
    }
    let mut queries = Vec::new();
    let mut truths = Vec::new();
    let mut skipped = 0;
    // test queries arrive in a seeded random order
    let order = shuffled_ids(fold.test.len(), fold_seed);
    for t in order.iter().map(|&i| &fold.test.transactions()[i]) {
        match make_query_with(t, cfg.k, cfg.strategy, fold_seed, |tag| support[tag as usize]) {
            Some((q, truth)) => {
                queries.push(q);
                truths.push(truth);
            }
            None => skipped += 1,
        }
    }
    let started = Instant::now();
    let (answers, stats) = answer_queries::<f64>(
        &fold.train,
        &corpus.graph,
        &corpus.groups,
        &queries,
        None,
        &cfg.pipeline(),
    )?;
    let time_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut sums = MetricSums::new(cfg.ranks.len());
    let mut out = FoldResult {
        time_ms,
        skipped,
        models_built: stats.models_built,
        batches: stats.batches.len(),
        fallbacks: stats.fallbacks,
        ..FoldResult::default()
    };
    let ck = fold.train.len().max(1) as f64;
    let uk_sizes: Vec<usize> = queries
        .par_iter()
        .map(|q| build_uk(&fold.train, &corpus.graph, q, cfg.uk_degree).len())
        .collect();
    for ((a, truth), uk) in answers.iter().zip(&truths).zip(uk_sizes) {
        sums.add(&score(&a.recommendation.tags(), truth, &cfg.ranks));
        out.tagsets += a.n_tagsets as f64;
        out.frac_ck += 100.0 * a.source_size as f64 / ck;
        if uk > 0 {
            out.frac_uk += 100.0 * a.source_size as f64 / uk as f64;
            out.frac_uk_n += 1;
        }
    }
    out.sums = Some(sums);
    Ok(out)
}

/// Runs every fold and averages over all scored queries of all folds.
pub fn run_experiment(corpus: &Corpus, cfg: &EvalConfig) -> Result<MetricsReport, EvalError> {
    cfg.validate()?;
    let folds = split(&corpus.db, cfg.split, cfg.seed)?;
    let results = folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| {
            run_fold(corpus, cfg, fold, mix(cfg.seed, 1000 + i as u64))
                .map_err(|source| EvalError::Fold { fold: i, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut sums = MetricSums::new(cfg.ranks.len());
    let mut total = FoldResult::default();
    for r in &results {
        let s = r.sums.as_ref().expect("filled by run_fold");
        for (acc, v) in sums.p.iter_mut().zip(&s.p) {
            *acc += v;
        }
        for (acc, v) in sums.s.iter_mut().zip(&s.s) {
            *acc += v;
        }
        sums.rr += s.rr;
        sums.n += s.n;
        total.tagsets += r.tagsets;
        total.frac_uk += r.frac_uk;
        total.frac_uk_n += r.frac_uk_n;
        total.frac_ck += r.frac_ck;
        total.time_ms += r.time_ms;
        total.skipped += r.skipped;
        total.models_built += r.models_built;
        total.batches += r.batches;
        total.fallbacks += r.fallbacks;
    }
    let (p_at, s_at, mrr) = sums.means();
    let n = sums.n.max(1) as f64;
    Ok(MetricsReport {
        k: cfg.k,
        method: cfg.recommender.method,
        source: cfg.source,
        ranks: cfg.ranks.clone(),
        p_at,
        s_at,
        mrr,
        n_tagsets: total.tagsets / n,
        time_ms: total.time_ms,
        frac_uk: total.frac_uk / total.frac_uk_n.max(1) as f64,
        frac_ck: total.frac_ck / n,
        n_queries: sums.n,
        skipped: total.skipped,
        models_built: total.models_built,
        batches: total.batches,
        fallbacks: total.fallbacks,
    })
}
