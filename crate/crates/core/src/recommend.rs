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

//! Association-rule tag recommenders.
//!
//! All three methods share candidate generation (the union of the input
//! tags' top-m partner lists) and score a candidate `c` by summing
//! conditional probabilities `P(c | X)` over non-empty `X ⊆ I`:
//!
//! * PAR uses only `|X| = 1`, read from the co-occurrence index.
//! * NAR adds `|X| >= 2` terms from exact supports of mined closed tagsets.
//! * FAR adds the same terms from code-table support estimates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codetable::{induce, CodeTable, CodeTableError};
use crate::corpus::{Query, TagDatabase, TagId, Tagset};
use crate::miner::{
    build_cooccurrence, mine_closed, CooccurrenceIndex, FrequentTagsetCollection, MinerError,
    MiningParams,
};
use crate::scalar::Score;

pub const DEFAULT_LIMIT: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum RecommendError {
    #[error("query has an empty input tagset")]
    EmptyInput,
    #[error(transparent)]
    Miner(#[from] MinerError),
    #[error(transparent)]
    CodeTable(#[from] CodeTableError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Par,
    Nar,
    Far,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Par => "PAR",
            Method::Nar => "NAR",
            Method::Far => "FAR",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "par" => Ok(Method::Par),
            "nar" => Ok(Method::Nar),
            "far" => Ok(Method::Far),
            _ => Err(format!("unknown method `{s}` (expected par, nar or far)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecommenderConfig {
    pub method: Method,
    /// Co-occurrence (`top_m`) and, for NAR, closed tagset mining.
    pub mining: MiningParams,
    /// Code table candidate mining, FAR only.
    pub ct_mining: MiningParams,
    pub max_recommendations: usize,
}

impl RecommenderConfig {
    pub fn new(method: Method) -> Self {
        RecommenderConfig {
            method,
            mining: MiningParams::nar_default(),
            ct_mining: MiningParams::far_default(),
            max_recommendations: DEFAULT_LIMIT,
        }
    }
}

/// Ranked tags for one query, best first.
#[derive(Clone, Debug, PartialEq)]
pub struct Recommendation<S> {
    pub items: Vec<(TagId, S)>,
    pub query: Query,
}

impl<S: Score> Recommendation<S> {
    pub fn tags(&self) -> Vec<TagId> {
        self.items.iter().map(|(t, _)| *t).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Pairwise scores `Σ_t joint(t,c)/sup(t)` for every candidate.
fn pairwise_scores<S: Score>(index: &CooccurrenceIndex, input: &Tagset) -> BTreeMap<TagId, S> {
    let mut scores: BTreeMap<TagId, S> = BTreeMap::new();
    for t in input.iter() {
        let support = index.tag_support(t);
        for &(c, joint) in index.top_list(t) {
            if input.contains(c) {
                continue;
            }
            let term = S::ratio(joint, support);
            let slot = scores.entry(c).or_insert_with(S::zero);
            *slot = *slot + term;
        }
    }
    scores
}

/// Input subsets that get a higher-order term: `2 <= |X| <= min(max_len-1, |I|)`.
fn higher_order_subsets(input: &Tagset, max_len: usize) -> Vec<Tagset> {
    let top = max_len.saturating_sub(1).min(input.len());
    (2..=top)
        .flat_map(|size| {
            input
                .iter()
                .combinations(size)
                .map(Tagset::from)
        })
        .collect()
}

fn rank<S: Score>(
    index: &CooccurrenceIndex,
    scores: BTreeMap<TagId, S>,
    query: &Query,
    limit: usize,
) -> Recommendation<S> {
    let mut items: Vec<(TagId, S)> = scores.into_iter().collect();
    items.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| index.tag_support(b.0).cmp(&index.tag_support(a.0)))
            .then(a.0.cmp(&b.0))
    });
    items.truncate(limit);
    Recommendation {
        items,
        query: query.clone(),
    }
}

fn check(query: &Query) -> Result<(), RecommendError> {
    if query.input.is_empty() {
        Err(RecommendError::EmptyInput)
    } else {
        Ok(())
    }
}

pub fn recommend_par<S: Score>(
    index: &CooccurrenceIndex,
    query: &Query,
    limit: usize,
) -> Result<Recommendation<S>, RecommendError> {
    check(query)?;
    let scores = pairwise_scores(index, &query.input);
    Ok(rank(index, scores, query, limit))
}

/// Adds `P(c|X)` for every candidate and every higher-order subset, with
/// `support` answering `sup(·)` (or `None` when unknown).
fn add_higher_order<S: Score>(
    scores: &mut BTreeMap<TagId, S>,
    input: &Tagset,
    max_len: usize,
    mut support: impl FnMut(&Tagset) -> Option<usize>,
) {
    for x in higher_order_subsets(input, max_len) {
        let denominator = match support(&x) {
            Some(d) if d > 0 => d,
            _ => continue,
        };
        for (&c, score) in scores.iter_mut() {
            if let Some(numerator) = support(&x.with(c)) {
                if numerator > 0 {
                    *score = *score + S::ratio(numerator, denominator);
                }
            }
        }
    }
}

pub fn recommend_nar<S: Score>(
    index: &CooccurrenceIndex,
    frequent: &FrequentTagsetCollection,
    query: &Query,
    limit: usize,
) -> Result<Recommendation<S>, RecommendError> {
    check(query)?;
    let mut scores = pairwise_scores(index, &query.input);
    add_higher_order(
        &mut scores,
        &query.input,
        frequent.params().max_len,
        |x| frequent.derived_support(x),
    );
    Ok(rank(index, scores, query, limit))
}

pub fn recommend_far<S: Score>(
    index: &CooccurrenceIndex,
    table: &CodeTable,
    max_len: usize,
    query: &Query,
    limit: usize,
) -> Result<Recommendation<S>, RecommendError> {
    check(query)?;
    let mut scores = pairwise_scores(index, &query.input);
    let mut cache: HashMap<Tagset, usize> = HashMap::new();
    add_higher_order(&mut scores, &query.input, max_len, |x| {
        let est = *cache
            .entry(x.clone())
            .or_insert_with(|| table.estimate_support(x));
        Some(est)
    });
    Ok(rank(index, scores, query, limit))
}

/// Everything a method needs to answer queries against one source database.
#[derive(Clone, Debug)]
pub enum AssociationModel {
    Par {
        index: CooccurrenceIndex,
    },
    Nar {
        index: CooccurrenceIndex,
        frequent: FrequentTagsetCollection,
    },
    Far {
        index: CooccurrenceIndex,
        table: CodeTable,
        max_len: usize,
    },
}

impl AssociationModel {
    pub fn build(db: &TagDatabase, config: &RecommenderConfig) -> Result<Self, RecommendError> {
        let index = build_cooccurrence(db, config.mining.top_m)?;
        Ok(match config.method {
            Method::Par => AssociationModel::Par { index },
            Method::Nar => AssociationModel::Nar {
                frequent: mine_closed(db, &config.mining)?,
                index,
            },
            Method::Far => {
                let candidates = mine_closed(db, &config.ct_mining)?;
                AssociationModel::Far {
                    table: induce(db, &candidates)?,
                    max_len: config.ct_mining.max_len,
                    index,
                }
            }
        })
    }

    pub fn index(&self) -> &CooccurrenceIndex {
        match self {
            AssociationModel::Par { index }
            | AssociationModel::Nar { index, .. }
            | AssociationModel::Far { index, .. } => index,
        }
    }

    /// Mined tagsets backing the model: `|F|` for NAR, the code table's used
    /// elements for FAR, 0 for PAR.
    pub fn n_tagsets(&self) -> usize {
        match self {
            AssociationModel::Par { .. } => 0,
            AssociationModel::Nar { frequent, .. } => frequent.len(),
            AssociationModel::Far { table, .. } => table.n_used(),
        }
    }

    pub fn recommend<S: Score>(
        &self,
        query: &Query,
        limit: usize,
    ) -> Result<Recommendation<S>, RecommendError> {
        match self {
            AssociationModel::Par { index } => recommend_par(index, query, limit),
            AssociationModel::Nar { index, frequent } => {
                recommend_nar(index, frequent, query, limit)
            }
            AssociationModel::Far {
                index,
                table,
                max_len,
            } => recommend_far(index, table, *max_len, query, limit),
        }
    }
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::miner::MinSupport;

    type Exact = Ratio<i64>;

    fn r(n: i64, d: i64) -> Exact {
        Ratio::new(n, d)
    }

    #[test]
    fn par_example() {
        // {a,b},{a,c},{a,c},{b,c}; I = {a}
        let db = TagDatabase::from_tagsets([vec![0, 1], vec![0, 2], vec![0, 2], vec![1, 2]]);
        let index = build_cooccurrence(&db, 2).unwrap();
        let rec: Recommendation<Exact> = recommend_par(&index, &Query::new(0, [0]), 5).unwrap();
        assert_eq!(rec.items, vec![(2, r(2, 3)), (1, r(1, 3))]);
    }

    #[test]
    fn whole_vocabulary_input_gives_nothing() {
        let db = TagDatabase::from_tagsets([vec![0, 1], vec![0, 2], vec![1, 2]]);
        let index = build_cooccurrence(&db, 50).unwrap();
        let rec: Recommendation<f64> =
            recommend_par(&index, &Query::new(0, [0, 1, 2]), 5).unwrap();
        assert!(rec.is_empty());
    }

    #[test]
    fn empty_input_is_rejected() {
        let db = TagDatabase::from_tagsets([vec![0, 1]]);
        let index = build_cooccurrence(&db, 50).unwrap();
        let err = recommend_par::<f64>(&index, &Query::new(0, Tagset::new()), 5);
        assert_eq!(err.unwrap_err(), RecommendError::EmptyInput);
    }

    fn nar_fixture() -> TagDatabase {
        // a=0 b=1 x=2 y=3
        TagDatabase::from_tagsets([vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 3], vec![0, 3]])
    }

    #[test]
    fn nar_higher_order_term_lifts_x() {
        let db = nar_fixture();
        let index = build_cooccurrence(&db, 50).unwrap();
        let f = mine_closed(&db, &MiningParams::new(MinSupport::Absolute(2), 3)).unwrap();
        let rec: Recommendation<Exact> =
            recommend_nar(&index, &f, &Query::new(0, [0, 1]), 5).unwrap();
        // pairwise x: 2/4 + 2/3, y: 2/4 + 1/3; {a,b}->x: 2/3, {a,b,y} infrequent
        assert_eq!(
            rec.items,
            vec![(2, r(1, 2) + r(2, 3) + r(2, 3)), (3, r(1, 2) + r(1, 3))]
        );
    }

    #[test]
    fn far_with_retained_pattern() {
        let db = nar_fixture();
        let index = build_cooccurrence(&db, 50).unwrap();
        let f = mine_closed(&db, &MiningParams::new(MinSupport::Absolute(1), 3)).unwrap();
        let ct = induce(&db, &f).unwrap();
        let abx = Tagset::from([0, 1, 2]);
        let rec: Recommendation<Exact> =
            recommend_far(&index, &ct, 3, &Query::new(0, [0, 1]), 5).unwrap();
        // the table keeps {a,b,x} (usage 2) and {a,b} (usage 1)
        assert_eq!(ct.usage(&abx), Some(2));
        assert_eq!(ct.estimate_support(&Tagset::from([0, 1])), 3);
        let expected_x = r(1, 2) + r(2, 3) + r(2, 3);
        assert_eq!(rec.items[0], (2, expected_x));
    }

    #[test]
    fn single_tag_queries_agree_across_methods() {
        let db = nar_fixture();
        let config = |m| RecommenderConfig {
            mining: MiningParams::new(MinSupport::Absolute(1), 3),
            ct_mining: MiningParams::new(MinSupport::Absolute(1), 3),
            ..RecommenderConfig::new(m)
        };
        let models: Vec<AssociationModel> = [Method::Par, Method::Nar, Method::Far]
            .into_iter()
            .map(|m| AssociationModel::build(&db, &config(m)).unwrap())
            .collect();
        for t in 0..4 {
            let q = Query::new(0, [t]);
            let recs: Vec<Recommendation<Exact>> =
                models.iter().map(|m| m.recommend(&q, 5).unwrap()).collect();
            assert_eq!(recs[0], recs[1]);
            assert_eq!(recs[0], recs[2]);
        }
    }

    #[test]
    fn singleton_code_table_reduces_far_to_par() {
        let db = nar_fixture();
        let index = build_cooccurrence(&db, 50).unwrap();
        let none = FrequentTagsetCollection::from_entries(vec![], MiningParams::default(), 1);
        let ct = induce(&db, &none).unwrap();
        let q = Query::new(0, [0, 1]);
        let far: Recommendation<Exact> = recommend_far(&index, &ct, 3, &q, 5).unwrap();
        let par: Recommendation<Exact> = recommend_par(&index, &q, 5).unwrap();
        assert_eq!(far, par);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("FAR".parse(), Ok(Method::Far));
        assert!("latre".parse::<Method>().is_err());
        assert_eq!(Method::Nar.to_string(), "NAR");
    }
}
