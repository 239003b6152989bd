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

//! Seeded synthetic folksonomies with planted structure.
//!
//! Users belong to one interest community and, within it, to a circle of
//! close friends. Each community owns a tag vocabulary; each circle draws a
//! pool of topic tags from it and each user a handful of favourites from
//! their circle's pool. A transaction takes tags from the user's favourites
//! with probability `community_tag_affinity` and from the shared vocabulary
//! otherwise. Friendships are dense within circles, sparse within
//! communities and rarer still across them. Groups live inside a community
//! and carry their own topic pool that group postings draw from.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, GroupIndex, Interner, SocialGraph, TagId, Tagset, Transaction};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("infeasible synthetic config: {0}")]
    Infeasible(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub users: usize,
    pub communities: usize,
    pub tags_per_community: usize,
    pub shared_tags: usize,
    /// Inclusive range.
    pub transactions_per_user: (usize, usize),
    /// Inclusive range.
    pub tags_per_transaction: (usize, usize),
    pub intra_community_edge_prob: f64,
    pub inter_community_edge_prob: f64,
    pub group_count: usize,
    pub group_membership_prob: f64,
    pub community_tag_affinity: f64,
    pub seed: u64,
    /// Users per friendship circle.
    pub circle_size: usize,
    pub circle_edge_prob: f64,
    /// Topic tags per circle and per group, drawn from the community vocabulary.
    pub topic_tags: usize,
    /// Favourite tags per user, drawn from the circle's topic tags.
    pub personal_tags: usize,
    /// Exponent of the rank-popularity law inside every tag pool.
    pub zipf_exponent: f64,
    /// Chance that a group member posts a transaction to one of their groups.
    pub group_posting_prob: f64,
    /// Extra users with a single transaction each, no friends and no
    /// groups, whose topical tags come uniformly from every community's
    /// vocabulary rather than a personal favourite set.
    pub casual_users: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 400,
            communities: 2,
            tags_per_community: 60,
            shared_tags: 40,
            transactions_per_user: (5, 15),
            tags_per_transaction: (3, 8),
            intra_community_edge_prob: 0.005,
            inter_community_edge_prob: 0.002,
            group_count: 8,
            group_membership_prob: 0.15,
            community_tag_affinity: 0.8,
            seed: 42,
            circle_size: 10,
            circle_edge_prob: 0.3,
            topic_tags: 15,
            personal_tags: 8,
            zipf_exponent: 1.0,
            group_posting_prob: 0.5,
            casual_users: 1200,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Infeasible(m));
        let (tx_lo, tx_hi) = self.transactions_per_user;
        let (len_lo, len_hi) = self.tags_per_transaction;
        if self.users == 0 || self.communities == 0 || self.circle_size == 0 {
            return bad("users, communities and circle_size must be positive".into());
        }
        if tx_lo > tx_hi || len_lo > len_hi {
            return bad("empty range".into());
        }
        if len_lo < 2 {
            return bad("transactions need at least 2 tags".into());
        }
        for (name, p) in [
            ("intra_community_edge_prob", self.intra_community_edge_prob),
            ("inter_community_edge_prob", self.inter_community_edge_prob),
            ("circle_edge_prob", self.circle_edge_prob),
            ("group_membership_prob", self.group_membership_prob),
            ("group_posting_prob", self.group_posting_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if !(self.community_tag_affinity > 0.5 && self.community_tag_affinity <= 1.0) {
            return bad(format!(
                "community_tag_affinity = {} must lie in (0.5, 1]",
                self.community_tag_affinity
            ));
        }
        if self.personal_tags == 0
            || self.personal_tags > self.topic_tags
            || self.topic_tags > self.tags_per_community
        {
            return bad("need 0 < personal_tags <= topic_tags <= tags_per_community".into());
        }
        let usable = self.personal_tags + self.shared_tags;
        if len_hi > usable {
            return bad(format!(
                "up to {len_hi} tags per transaction but a user can only use {usable}"
            ));
        }
        if self.zipf_exponent.is_nan() || self.zipf_exponent < 0.0 {
            return bad("zipf_exponent must be non-negative".into());
        }
        Ok(())
    }
}

/// Weighted pool of tags, first tag most popular.
struct Pool {
    tags: Vec<TagId>,
    weights: WeightedIndex<f64>,
}

impl Pool {
    fn new(tags: Vec<TagId>, exponent: f64) -> Option<Self> {
        if tags.is_empty() {
            return None;
        }
        let w = (1..=tags.len()).map(|r| (r as f64).powf(-exponent));
        Some(Pool {
            weights: WeightedIndex::new(w).expect("positive weights"),
            tags,
        })
    }

    fn exhausted(&self, used: &BTreeSet<TagId>) -> bool {
        self.tags.iter().all(|t| used.contains(t))
    }

    fn draw(&self, rng: &mut ChaCha8Rng, used: &BTreeSet<TagId>) -> TagId {
        loop {
            let t = self.tags[self.weights.sample(rng)];
            if !used.contains(&t) {
                return t;
            }
        }
    }
}

fn subset(rng: &mut ChaCha8Rng, from: &[TagId], n: usize) -> Vec<TagId> {
    sample(rng, from.len(), n).iter().map(|i| from[i]).collect()
}

/// Generates a corpus; identical configs give identical corpora.
pub fn generate(cfg: &SynthConfig) -> Result<Corpus, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut vocabulary = Interner::new();
    let community_vocab: Vec<Vec<TagId>> = (0..cfg.communities)
        .map(|c| {
            (0..cfg.tags_per_community)
                .map(|j| vocabulary.intern(&format!("c{c}_{j}")))
                .collect()
        })
        .collect();
    let shared_vocab: Vec<TagId> = (0..cfg.shared_tags)
        .map(|j| vocabulary.intern(&format!("s{j}")))
        .collect();
    let shared = Pool::new(shared_vocab, cfg.zipf_exponent);

    let mut users = Interner::new();
    let mut interests = Interner::new();
    for c in 0..cfg.communities {
        interests.intern(&format!("c{c}"));
    }
    let community: Vec<usize> = (0..cfg.users).map(|u| u % cfg.communities).collect();
    for u in 0..cfg.users + cfg.casual_users {
        users.intern(&format!("u{u}"));
    }
    // circles are consecutive runs of a community's members
    let mut circle = vec![0usize; cfg.users];
    let mut circle_topics: Vec<Vec<TagId>> = Vec::new();
    for (c, vocab) in community_vocab.iter().enumerate() {
        let members: Vec<usize> = (0..cfg.users).filter(|&u| community[u] == c).collect();
        for chunk in members.chunks(cfg.circle_size) {
            let topics = subset(&mut rng, vocab, cfg.topic_tags);
            for &u in chunk {
                circle[u] = circle_topics.len();
            }
            circle_topics.push(topics);
        }
    }
    let personal: Vec<Pool> = (0..cfg.users)
        .map(|u| {
            let tags = subset(&mut rng, &circle_topics[circle[u]], cfg.personal_tags);
            Pool::new(tags, cfg.zipf_exponent).expect("personal_tags > 0")
        })
        .collect();

    let mut graph = SocialGraph::with_users(cfg.users + cfg.casual_users);
    for u in 0..cfg.users {
        for v in u + 1..cfg.users {
            let p = if circle[u] == circle[v] {
                cfg.circle_edge_prob
            } else if community[u] == community[v] {
                cfg.intra_community_edge_prob
            } else {
                cfg.inter_community_edge_prob
            };
            if rng.random_bool(p) {
                graph.add_edge(u as u32, v as u32);
            }
        }
    }

    let mut group_labels = Interner::new();
    let mut groups = GroupIndex::new();
    let mut group_topics = Vec::new();
    for g in 0..cfg.group_count {
        group_labels.intern(&format!("g{g}"));
        let c = g % cfg.communities;
        let topics = subset(&mut rng, &community_vocab[c], cfg.personal_tags);
        group_topics.push((c, Pool::new(topics, cfg.zipf_exponent).expect("non-empty")));
    }
    let mut memberships: Vec<Vec<u32>> = vec![Vec::new(); cfg.users];
    for (u, mine) in memberships.iter_mut().enumerate() {
        for (g, (c, _)) in group_topics.iter().enumerate() {
            if *c == community[u] && rng.random_bool(cfg.group_membership_prob) {
                groups.add_member(g as u32, u as u32);
                mine.push(g as u32);
            }
        }
    }

    let everything: Vec<TagId> = community_vocab.concat();
    let broad = Pool::new(everything, 0.0).expect("tags_per_community > 0");
    let mut transactions = Vec::new();
    let casual = (0..cfg.casual_users).map(|i| (cfg.users + i, 1));
    let regular = (0..cfg.users).map(|u| {
        let n = rng.random_range(cfg.transactions_per_user.0..=cfg.transactions_per_user.1);
        (u, n)
    });
    let plan: Vec<(usize, usize)> = regular.collect::<Vec<_>>().into_iter().chain(casual).collect();
    for (u, n) in plan {
        let community_of = if u < cfg.users {
            community[u]
        } else {
            rng.random_range(0..cfg.communities)
        };
        for _ in 0..n {
            let mine: &[u32] = memberships.get(u).map_or(&[], Vec::as_slice);
            let group = match mine {
                [] => None,
                mine if rng.random_bool(cfg.group_posting_prob) => {
                    Some(mine[rng.random_range(0..mine.len())])
                }
                _ => None,
            };
            let topical = match group {
                Some(g) => &group_topics[g as usize].1,
                None if u < cfg.users => &personal[u],
                None => &broad,
            };
            let len = rng.random_range(cfg.tags_per_transaction.0..=cfg.tags_per_transaction.1);
            let mut used = BTreeSet::new();
            while used.len() < len {
                let want_topical = rng.random_bool(cfg.community_tag_affinity);
                let pool = match (&shared, want_topical) {
                    (Some(s), false) if !s.exhausted(&used) => s,
                    _ if !topical.exhausted(&used) => topical,
                    (Some(s), _) => s,
                    (None, _) => unreachable!("validated: enough tags per user"),
                };
                used.insert(pool.draw(&mut rng, &used));
            }
            let id = transactions.len() as u32;
            if let Some(g) = group {
                groups.add_transaction(g, id);
            }
            transactions.push(Transaction {
                id,
                user: u as u32,
                group,
                interest: Some(community_of as u32),
                tags: used.into_iter().collect::<Tagset>(),
            });
        }
    }

    Ok(Corpus {
        db: crate::corpus::TagDatabase::new(Arc::new(vocabulary), transactions),
        graph,
        groups,
        users,
        group_labels,
        interests,
    })
}
