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

//! Source databases built from social information.
//!
//! A recommender is only as good as the data it mines. The builders here
//! select, per query or per batch of queries, which training transactions
//! form the source database: everything (collective knowledge), the
//! friendship neighbourhood restricted to the query's interest
//! (user-centered knowledge), one user's history (personomy), the
//! histories of everyone in a batch (batched personomy), or a user's
//! history plus their groups' data (community batched personomy).

mod batch;
mod pipeline;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{GroupIndex, Query, SocialGraph, TagDatabase, UserId};

pub use batch::{batch_queue, form_batches, Batch, BatchPolicy, BatchReason, BatchReceiver, QuerySender};
pub use pipeline::{answer_queries, Answer, PipelineError, PipelineOptions, PipelineStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Ck,
    Uk,
    Personomy,
    SocialPersonomy,
    Batched,
    SocialBatched,
    CommunityBatched,
}

impl SourceKind {
    pub fn takes_degree(self) -> bool {
        matches!(
            self,
            SourceKind::Uk | SourceKind::SocialPersonomy | SourceKind::SocialBatched
        )
    }

    pub fn needs_graph(self) -> bool {
        self.takes_degree()
    }

    pub fn needs_groups(self) -> bool {
        self == SourceKind::CommunityBatched
    }

    pub fn keyword(self) -> &'static str {
        match self {
            SourceKind::Ck => "ck",
            SourceKind::Uk => "uk",
            SourceKind::Personomy => "personomy",
            SourceKind::SocialPersonomy => "social-personomy",
            SourceKind::Batched => "batched",
            SourceKind::SocialBatched => "social-batched",
            SourceKind::CommunityBatched => "community",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ck" => SourceKind::Ck,
            "uk" => SourceKind::Uk,
            "personomy" => SourceKind::Personomy,
            "social-personomy" => SourceKind::SocialPersonomy,
            "batched" => SourceKind::Batched,
            "social-batched" => SourceKind::SocialBatched,
            "community" | "community-batched" | "gk" => SourceKind::CommunityBatched,
            _ => return Err(format!("unknown source `{s}`")),
        })
    }
}

/// Which source database to use, with the friendship degree where relevant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSelection {
    pub kind: SourceKind,
    pub degree: Option<usize>,
}

impl SourceSelection {
    pub fn new(kind: SourceKind, degree: Option<usize>) -> Result<Self, String> {
        match (kind.takes_degree(), degree) {
            (true, None) => Err(format!("source `{kind}` requires a degree")),
            (false, Some(_)) => Err(format!("source `{kind}` takes no degree")),
            _ => Ok(SourceSelection { kind, degree }),
        }
    }

    pub fn ck() -> Self {
        SourceSelection {
            kind: SourceKind::Ck,
            degree: None,
        }
    }

    /// Short label in table style, e.g. `D^2_batched`, `UK`, `GK`.
    pub fn label(&self) -> String {
        match (self.kind, self.degree) {
            (SourceKind::Ck, _) => "CK".into(),
            (SourceKind::Uk, _) => "UK".into(),
            (SourceKind::Personomy, _) => "D^u".into(),
            (SourceKind::SocialPersonomy, Some(n)) => format!("D^{n}"),
            (SourceKind::Batched, _) => "D^u_batched".into(),
            (SourceKind::SocialBatched, Some(n)) => format!("D^{n}_batched"),
            (SourceKind::CommunityBatched, _) => "GK".into(),
            (kind, None) => kind.keyword().into(),
        }
    }
}

/// `kind` or `kind:degree`, e.g. `ck`, `uk:3`, `social-batched:1`.
impl fmt::Display for SourceSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree {
            Some(n) => write!(f, "{}:{n}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl FromStr for SourceSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, degree) = match s.split_once(':') {
            Some((k, d)) => {
                let n = d.parse().map_err(|_| format!("bad degree in `{s}`"))?;
                (k.parse()?, Some(n))
            }
            None => (s.parse()?, None),
        };
        SourceSelection::new(kind, degree)
    }
}

/// When a selection counts as too small and collective knowledge is used instead.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fallback {
    /// Selections with fewer transactions than this (and empty ones) fall back.
    pub min_transactions: usize,
}

impl Fallback {
    pub fn applies(&self, selection: &TagDatabase) -> bool {
        selection.is_empty() || selection.len() < self.min_transactions
    }
}

/// Users within `n` friendship hops of `u`, `u` included.
pub fn nth_degree_users(graph: &SocialGraph, u: UserId, n: usize) -> BTreeSet<UserId> {
    let mut seen = BTreeSet::from([u]);
    let mut frontier = VecDeque::from([(u, 0usize)]);
    while let Some((v, depth)) = frontier.pop_front() {
        if depth == n {
            continue;
        }
        for w in graph.neighbors(v) {
            if seen.insert(w) {
                frontier.push_back((w, depth + 1));
            }
        }
    }
    seen
}

/// Collective knowledge: the whole training database.
pub fn build_ck(db: &TagDatabase) -> TagDatabase {
    db.clone()
}

/// Transactions of users within `n` hops of the querying user that share
/// the query's interest. A query without an interest label keeps every
/// interest.
pub fn build_uk(db: &TagDatabase, graph: &SocialGraph, query: &Query, n: usize) -> TagDatabase {
    let users = nth_degree_users(graph, query.user, n);
    db.select(|t| {
        users.contains(&t.user) && (query.interest.is_none() || t.interest == query.interest)
    })
}

/// All historic transactions of `u`.
pub fn build_personomy(db: &TagDatabase, u: UserId) -> TagDatabase {
    db.select(|t| t.user == u)
}

/// Union of the personomies of everyone within `n` hops of `u`.
pub fn build_social_personomy(
    db: &TagDatabase,
    graph: &SocialGraph,
    u: UserId,
    n: usize,
) -> TagDatabase {
    let users = nth_degree_users(graph, u, n);
    db.select(|t| users.contains(&t.user))
}

/// A source database and whether it came from the collective fallback.
#[derive(Clone, Debug)]
pub struct Source {
    pub db: TagDatabase,
    pub fell_back: bool,
}

impl Source {
    pub fn or_fallback(selection: TagDatabase, ck: &TagDatabase, fallback: Fallback) -> Self {
        if fallback.applies(&selection) {
            Source {
                db: build_ck(ck),
                fell_back: true,
            }
        } else {
            Source {
                db: selection,
                fell_back: false,
            }
        }
    }
}

/// Histories of every user with a query in `batch`, widened to `degree`-hop
/// friends when given. Falls back to collective knowledge when the
/// selection is empty (or below `fallback.min_transactions`).
pub fn build_batched(
    db: &TagDatabase,
    graph: &SocialGraph,
    batch: &Batch,
    degree: Option<usize>,
    fallback: Fallback,
) -> Source {
    let mut users = BTreeSet::new();
    for q in &batch.queries {
        match degree {
            None => {
                users.insert(q.user);
            }
            Some(n) => users.extend(nth_degree_users(graph, q.user, n)),
        }
    }
    Source::or_fallback(db.select(|t| users.contains(&t.user)), db, fallback)
}

/// Splits queries by whether their user belongs to a group whose groups
/// hold at least `min_group_transactions` transactions in total. Returns
/// `(grouped, ungrouped)`, each in input order.
pub fn route_community(
    queries: &[Query],
    groups: &GroupIndex,
    min_group_transactions: usize,
) -> (Vec<Query>, Vec<Query>) {
    queries
        .iter()
        .cloned()
        .partition(|q| is_grouped(groups, q.user, min_group_transactions))
}

pub(crate) fn is_grouped(groups: &GroupIndex, user: UserId, min_group_transactions: usize) -> bool {
    groups.has_groups(user) && groups.group_transaction_count(user) >= min_group_transactions
}

/// The querying user's own history plus every transaction posted to one of
/// their groups, each transaction instance once.
pub fn build_community(db: &TagDatabase, groups: &GroupIndex, query: &Query) -> TagDatabase {
    let mine: BTreeSet<_> = groups.groups_of(query.user).collect();
    db.select(|t| t.user == query.user || t.group.is_some_and(|g| mine.contains(&g)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corpus::{Interner, Tagset, Transaction};

    fn txn(id: u32, user: u32, group: Option<u32>, interest: Option<u32>) -> Transaction {
        Transaction {
            id,
            user,
            group,
            interest,
            tags: Tagset::from([0, 1]),
        }
    }

    fn db(rows: Vec<Transaction>) -> TagDatabase {
        let mut v = Interner::new();
        v.intern("a");
        v.intern("b");
        TagDatabase::new(Arc::new(v), rows)
    }

    fn chain() -> SocialGraph {
        let mut g = SocialGraph::with_users(4);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g
    }

    #[test]
    fn bfs_hops() {
        let g = chain();
        assert_eq!(nth_degree_users(&g, 0, 0), BTreeSet::from([0]));
        assert_eq!(nth_degree_users(&g, 0, 1), BTreeSet::from([0, 1]));
        assert_eq!(nth_degree_users(&g, 0, 2), BTreeSet::from([0, 1, 2]));
        assert_eq!(nth_degree_users(&g, 0, 10), BTreeSet::from([0, 1, 2]));
        assert_eq!(nth_degree_users(&g, 3, 5), BTreeSet::from([3]));
        assert_eq!(nth_degree_users(&g, 99, 1), BTreeSet::from([99]));
    }

    #[test]
    fn uk_filters_by_hops_and_interest() {
        let d = db(vec![
            txn(0, 0, None, Some(0)),
            txn(1, 1, None, Some(0)),
            txn(2, 1, None, Some(1)),
            txn(3, 2, None, Some(0)),
            txn(4, 3, None, Some(0)),
        ]);
        let q = Query::new(0, [0]).with_interest(0);
        assert_eq!(build_uk(&d, &chain(), &q, 1).instance_ids(), vec![0, 1]);
        assert_eq!(build_uk(&d, &chain(), &q, 9).instance_ids(), vec![0, 1, 3]);
        let nobody = Query::new(3, [0]).with_interest(1);
        assert!(build_uk(&d, &chain(), &nobody, 0).is_empty());
    }

    #[test]
    fn personomy_and_social_personomy() {
        let d = db(vec![
            txn(0, 0, None, None),
            txn(1, 1, None, None),
            txn(2, 0, None, None),
            txn(3, 2, None, None),
        ]);
        assert_eq!(build_personomy(&d, 0).instance_ids(), vec![0, 2]);
        assert!(build_personomy(&d, 42).is_empty());
        assert_eq!(
            build_social_personomy(&d, &chain(), 0, 1).instance_ids(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn batched_falls_back_when_empty() {
        let d = db(vec![txn(0, 0, None, None), txn(1, 1, None, None)]);
        let batch = Batch {
            queries: vec![Query::new(7, [0]), Query::new(8, [0])],
            reason: BatchReason::Flush,
        };
        let s = build_batched(&d, &chain(), &batch, None, Fallback::default());
        assert!(s.fell_back);
        assert_eq!(s.db.len(), 2);

        let batch = Batch {
            queries: vec![Query::new(0, [0]), Query::new(1, [0])],
            reason: BatchReason::Flush,
        };
        let s = build_batched(&d, &chain(), &batch, None, Fallback::default());
        assert!(!s.fell_back);
        assert_eq!(s.db.instance_ids(), vec![0, 1]);
        let strict = Fallback { min_transactions: 3 };
        assert!(build_batched(&d, &chain(), &batch, None, strict).fell_back);
    }

    #[test]
    fn community_union_dedups_instances() {
        let mut groups = GroupIndex::new();
        groups.add_member(0, 5);
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.push(txn(i, 6 + i, Some(0), None));
        }
        rows[0].user = 5; // own transaction that is also in the group
        rows.push(txn(5, 5, None, None));
        rows.push(txn(6, 9, None, None));
        let d = db(rows);
        let q = Query::new(5, [0]);
        assert_eq!(build_community(&d, &groups, &q).len(), 6);
    }

    #[test]
    fn routing_partitions() {
        let mut groups = GroupIndex::new();
        groups.add_member(0, 1);
        groups.add_member(1, 1);
        groups.add_transaction(0, 0);
        let qs = vec![Query::new(1, [0]), Query::new(2, [0]), Query::new(1, [1])];
        let (grouped, ungrouped) = route_community(&qs, &groups, 1);
        assert_eq!(grouped, vec![qs[0].clone(), qs[2].clone()]);
        assert_eq!(ungrouped, vec![qs[1].clone()]);
        let (grouped, ungrouped) = route_community(&qs, &groups, 2);
        assert!(grouped.is_empty());
        assert_eq!(ungrouped.len(), 3);
    }

    #[test]
    fn selection_validation() {
        assert!(SourceSelection::new(SourceKind::Uk, None).is_err());
        assert!(SourceSelection::new(SourceKind::Ck, Some(1)).is_err());
        let s = SourceSelection::new(SourceKind::SocialBatched, Some(2)).unwrap();
        assert_eq!(s.label(), "D^2_batched");
        assert_eq!("social-batched".parse(), Ok(SourceKind::SocialBatched));
        assert_eq!("community".parse(), Ok(SourceKind::CommunityBatched));
        assert_eq!(s.to_string().parse::<SourceSelection>(), Ok(s));
        assert_eq!("ck".parse::<SourceSelection>(), Ok(SourceSelection::ck()));
        assert!("uk".parse::<SourceSelection>().is_err());
        assert!("uk:x".parse::<SourceSelection>().is_err());
    }
}
