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

//! Answering a stream of queries under one source selection.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use super::{
    build_batched, build_community, build_personomy, build_social_personomy, build_uk,
    form_batches, is_grouped, BatchPolicy, BatchReason, Fallback, Source, SourceKind,
    SourceSelection,
};
use crate::corpus::{GroupIndex, Query, SocialGraph, TagDatabase, TxnId};
use crate::recommend::{AssociationModel, RecommendError, Recommendation, RecommenderConfig};
use crate::scalar::Score;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("query {index}: {source}")]
    Query {
        index: usize,
        #[source]
        source: RecommendError,
    },
    #[error("building a model: {0}")]
    Model(#[from] RecommendError),
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    pub config: RecommenderConfig,
    pub selection: SourceSelection,
    pub policy: BatchPolicy,
    pub fallback: Fallback,
    /// Users whose groups hold fewer transactions than this are routed to
    /// collective knowledge by the community source.
    pub min_group_transactions: usize,
}

impl PipelineOptions {
    pub fn new(config: RecommenderConfig, selection: SourceSelection) -> Self {
        PipelineOptions {
            config,
            selection,
            policy: BatchPolicy::unbounded(),
            fallback: Fallback::default(),
            min_group_transactions: 1,
        }
    }
}

/// The answer to one query, in input order.
#[derive(Clone, Debug, PartialEq)]
pub struct Answer<S> {
    pub recommendation: Recommendation<S>,
    /// Transactions in the source database the model was mined from.
    pub source_size: usize,
    /// Tagsets behind the model (see [`AssociationModel::n_tagsets`]).
    pub n_tagsets: usize,
    pub fell_back: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipelineStats {
    /// Association models mined.
    pub models_built: usize,
    /// Size and closing reason of every batch, for batched sources.
    pub batches: Vec<(usize, BatchReason)>,
    pub fallbacks: usize,
}

struct Built {
    model: Option<Arc<AssociationModel>>,
    source_size: usize,
    fell_back: bool,
}

fn build(db: &TagDatabase, config: &RecommenderConfig) -> Result<Option<AssociationModel>, RecommendError> {
    if db.is_empty() {
        return Ok(None);
    }
    AssociationModel::build(db, config).map(Some)
}

/// Answers `queries` against `train`. With `arrivals` (offsets from a
/// common start, one per query) batched sources close batches on the wait
/// bound too; without, every query arrives at once.
pub fn answer_queries<S: Score>(
    train: &TagDatabase,
    graph: &SocialGraph,
    groups: &GroupIndex,
    queries: &[Query],
    arrivals: Option<&[Duration]>,
    opts: &PipelineOptions,
) -> Result<(Vec<Answer<S>>, PipelineStats), PipelineError> {
    if let Some(a) = arrivals {
        if a.len() != queries.len() {
            return Err(PipelineError::Config(format!(
                "{} arrival times for {} queries",
                a.len(),
                queries.len()
            )));
        }
    }
    let mut stats = PipelineStats::default();
    let config = &opts.config;
    let mut ck_cache: Option<Arc<AssociationModel>> = None;
    let mut shared_ck = |stats: &mut PipelineStats| -> Result<Option<Arc<AssociationModel>>, RecommendError> {
        if ck_cache.is_none() && !train.is_empty() {
            ck_cache = build(train, config)?.map(Arc::new);
            stats.models_built += 1;
        }
        Ok(ck_cache.clone())
    };

    let mut plan: Vec<Option<usize>> = vec![None; queries.len()];
    let mut built: Vec<Built> = Vec::new();

    match opts.selection.kind {
        SourceKind::Ck => {
            let model = shared_ck(&mut stats)?;
            built.push(Built {
                model,
                source_size: train.len(),
                fell_back: false,
            });
            plan.iter_mut().for_each(|p| *p = Some(0));
        }
        SourceKind::Uk | SourceKind::Personomy | SourceKind::SocialPersonomy => {
            let degree = opts.selection.degree.unwrap_or(0);
            let sources: Vec<Source> = queries
                .par_iter()
                .map(|q| {
                    let sel = match opts.selection.kind {
                        SourceKind::Uk => build_uk(train, graph, q, degree),
                        SourceKind::Personomy => build_personomy(train, q.user),
                        _ => build_social_personomy(train, graph, q.user, degree),
                    };
                    Source {
                        fell_back: opts.fallback.applies(&sel),
                        db: sel,
                    }
                })
                .collect();
            // user-centered sources depend only on the selected instances and
            // are shared; personomies are mined per query
            let share = opts.selection.kind == SourceKind::Uk;
            let mut keyed: HashMap<Vec<TxnId>, usize> = HashMap::new();
            let mut to_build: Vec<(usize, &TagDatabase)> = Vec::new();
            let mut ck_slot: Option<usize> = None;
            for (i, s) in sources.iter().enumerate() {
                if s.fell_back {
                    stats.fallbacks += 1;
                    let slot = match ck_slot {
                        Some(slot) => slot,
                        None => {
                            let model = shared_ck(&mut stats)?;
                            built.push(Built {
                                model,
                                source_size: train.len(),
                                fell_back: true,
                            });
                            ck_slot = Some(built.len() - 1);
                            built.len() - 1
                        }
                    };
                    plan[i] = Some(slot);
                    continue;
                }
                if share {
                    if let Some(&slot) = keyed.get(&s.db.instance_ids()) {
                        plan[i] = Some(slot);
                        continue;
                    }
                }
                built.push(Built {
                    model: None,
                    source_size: s.db.len(),
                    fell_back: false,
                });
                let slot = built.len() - 1;
                if share {
                    keyed.insert(s.db.instance_ids(), slot);
                }
                to_build.push((slot, &s.db));
                plan[i] = Some(slot);
            }
            build_slots(&mut built, &to_build, config, &mut stats)?;
        }
        SourceKind::Batched | SourceKind::SocialBatched => {
            let order = arrival_order(queries.len(), arrivals);
            let batches = batch_indices(&order, queries, arrivals, opts.policy);
            let degree = opts.selection.degree;
            let sources: Vec<Source> = batches
                .par_iter()
                .map(|(batch, _)| build_batched(train, graph, batch, degree, opts.fallback))
                .collect();
            let mut to_build = Vec::new();
            for ((batch, members), source) in batches.iter().zip(&sources) {
                stats.batches.push((batch.len(), batch.reason));
                if source.fell_back {
                    stats.fallbacks += batch.len();
                }
                built.push(Built {
                    model: None,
                    source_size: source.db.len(),
                    fell_back: source.fell_back,
                });
                let slot = built.len() - 1;
                to_build.push((slot, &source.db));
                for &i in members {
                    plan[i] = Some(slot);
                }
            }
            build_slots(&mut built, &to_build, config, &mut stats)?;
        }
        SourceKind::CommunityBatched => {
            let grouped_ix: Vec<usize> = (0..queries.len())
                .filter(|&i| is_grouped(groups, queries[i].user, opts.min_group_transactions))
                .collect();
            let is_grouped: Vec<bool> = {
                let mut v = vec![false; queries.len()];
                grouped_ix.iter().for_each(|&i| v[i] = true);
                v
            };
            // ungrouped queries are answered from collective knowledge in
            // batches that share the one collective model
            let rest: Vec<usize> = arrival_order(queries.len(), arrivals)
                .into_iter()
                .filter(|&i| !is_grouped[i])
                .collect();
            if !rest.is_empty() {
                let model = shared_ck(&mut stats)?;
                built.push(Built {
                    model,
                    source_size: train.len(),
                    fell_back: false,
                });
                let slot = built.len() - 1;
                for (batch, members) in batch_indices(&rest, queries, arrivals, opts.policy) {
                    stats.batches.push((batch.len(), batch.reason));
                    for i in members {
                        plan[i] = Some(slot);
                    }
                }
            }
            let mut by_user: HashMap<u32, usize> = HashMap::new();
            let mut owned: Vec<(usize, TagDatabase)> = Vec::new();
            for &i in &grouped_ix {
                let q = &queries[i];
                if let Some(&slot) = by_user.get(&q.user) {
                    plan[i] = Some(slot);
                    continue;
                }
                let sel = build_community(train, groups, q);
                let slot = if opts.fallback.applies(&sel) {
                    stats.fallbacks += 1;
                    let model = shared_ck(&mut stats)?;
                    built.push(Built {
                        model,
                        source_size: train.len(),
                        fell_back: true,
                    });
                    built.len() - 1
                } else {
                    built.push(Built {
                        model: None,
                        source_size: sel.len(),
                        fell_back: false,
                    });
                    owned.push((built.len() - 1, sel));
                    built.len() - 1
                };
                by_user.insert(q.user, slot);
                plan[i] = Some(slot);
            }
            let refs: Vec<(usize, &TagDatabase)> = owned.iter().map(|(s, d)| (*s, d)).collect();
            build_slots(&mut built, &refs, config, &mut stats)?;
        }
    }

    let limit = config.max_recommendations;
    let answers = queries
        .par_iter()
        .zip(plan.par_iter())
        .enumerate()
        .map(|(index, (q, slot))| {
            let b = &built[slot.expect("every query is planned")];
            let recommendation = match &b.model {
                Some(m) => m.recommend::<S>(q, limit),
                None if q.input.is_empty() => Err(RecommendError::EmptyInput),
                None => Ok(Recommendation {
                    items: Vec::new(),
                    query: q.clone(),
                }),
            }
            .map_err(|source| PipelineError::Query { index, source })?;
            Ok(Answer {
                recommendation,
                source_size: b.source_size,
                n_tagsets: b.model.as_ref().map_or(0, |m| m.n_tagsets()),
                fell_back: b.fell_back,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok((answers, stats))
}

fn build_slots(
    built: &mut [Built],
    to_build: &[(usize, &TagDatabase)],
    config: &RecommenderConfig,
    stats: &mut PipelineStats,
) -> Result<(), RecommendError> {
    let models = to_build
        .par_iter()
        .map(|(_, db)| build(db, config))
        .collect::<Result<Vec<_>, _>>()?;
    for ((slot, db), model) in to_build.iter().zip(models) {
        if !db.is_empty() {
            stats.models_built += 1;
        }
        built[*slot].model = model.map(Arc::new);
    }
    Ok(())
}

/// Query indices sorted by arrival, ties in input order.
fn arrival_order(n: usize, arrivals: Option<&[Duration]>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(a) = arrivals {
        order.sort_by_key(|&i| a[i]);
    }
    order
}

/// Batches over the queries at `order`, each with the input indices of its members.
fn batch_indices(
    order: &[usize],
    queries: &[Query],
    arrivals: Option<&[Duration]>,
    policy: BatchPolicy,
) -> Vec<(super::Batch, Vec<usize>)> {
    let stream = order.iter().map(|&i| {
        let at = arrivals.map_or(Duration::ZERO, |a| a[i]);
        (at, queries[i].clone())
    });
    let batches = form_batches(stream, policy);
    // batches partition the stream in order
    let mut next = 0;
    batches
        .into_iter()
        .map(|b| {
            let members = order[next..next + b.len()].to_vec();
            next += b.len();
            (b, members)
        })
        .collect()
}
