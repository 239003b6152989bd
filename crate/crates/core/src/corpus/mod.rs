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

//! Tags, users, groups, transactions and the social graph.
//!
//! Every label (tag, user, group, interest) is interned to a dense `u32` at
//! load time; everything downstream works on ids only.

mod io;
mod profile;
mod tagset;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

pub use io::{
    load_corpus, parse_corpus, parse_queries, write_graph, write_groups, write_queries,
    write_transactions, CorpusError, LoadOptions, LoadReport,
};
pub use profile::{profile, DatasetProfile, FRIEND_BUCKETS, LENGTH_BUCKETS};
pub use tagset::Tagset;

pub type TagId = u32;
pub type UserId = u32;
pub type GroupId = u32;
pub type InterestId = u32;
/// Identity of one transaction instance (one tagged resource).
pub type TxnId = u32;

/// Bijection between labels and dense ids, ids assigned in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interner {
    labels: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<u32> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: u32) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// The tag vocabulary. Ids are contiguous from zero.
pub type TagVocabulary = Interner;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub id: TxnId,
    pub user: UserId,
    pub group: Option<GroupId>,
    pub interest: Option<InterestId>,
    pub tags: Tagset,
}

/// An ordered multiset of transactions over a shared vocabulary.
///
/// Sub-databases produced by selection share the parent's vocabulary.
#[derive(Clone, Debug)]
pub struct TagDatabase {
    vocabulary: Arc<TagVocabulary>,
    transactions: Vec<Transaction>,
}

impl TagDatabase {
    pub fn new(vocabulary: Arc<TagVocabulary>, transactions: Vec<Transaction>) -> Self {
        TagDatabase {
            vocabulary,
            transactions,
        }
    }

    /// Builds a database from bare tagsets, one user per transaction and the
    /// tag labels `t0, t1, ...` up to the largest id used.
    pub fn from_tagsets<I>(tagsets: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Tagset>,
    {
        let sets: Vec<Tagset> = tagsets.into_iter().map(Into::into).collect();
        let n_tags = sets
            .iter()
            .flat_map(|s| s.iter())
            .max()
            .map_or(0, |m| m as usize + 1);
        let mut vocabulary = Interner::new();
        for t in 0..n_tags {
            vocabulary.intern(&format!("t{t}"));
        }
        let transactions = sets
            .into_iter()
            .enumerate()
            .map(|(i, tags)| Transaction {
                id: i as TxnId,
                user: i as UserId,
                group: None,
                interest: None,
                tags,
            })
            .collect();
        TagDatabase::new(Arc::new(vocabulary), transactions)
    }

    pub fn vocabulary(&self) -> &Arc<TagVocabulary> {
        &self.vocabulary
    }

    pub fn n_tags(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Transaction> {
        self.transactions.iter()
    }

    /// Keeps the transactions matching `pred`, in order, over the same vocabulary.
    pub fn select<F>(&self, mut pred: F) -> TagDatabase
    where
        F: FnMut(&Transaction) -> bool,
    {
        TagDatabase {
            vocabulary: Arc::clone(&self.vocabulary),
            transactions: self
                .transactions
                .iter()
                .filter(|t| pred(t))
                .cloned()
                .collect(),
        }
    }

    pub fn shares_vocabulary(&self, other: &TagDatabase) -> bool {
        Arc::ptr_eq(&self.vocabulary, &other.vocabulary)
    }

    /// Number of transactions whose tagset contains `x`.
    pub fn support(&self, x: &Tagset) -> usize {
        self.transactions
            .iter()
            .filter(|t| x.is_subset(&t.tags))
            .count()
    }

    pub fn owners(&self) -> BTreeSet<UserId> {
        self.transactions.iter().map(|t| t.user).collect()
    }

    /// Sorted transaction-instance ids; identifies a selection.
    pub fn instance_ids(&self) -> Vec<TxnId> {
        let mut ids: Vec<TxnId> = self.transactions.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        ids
    }
}

/// Undirected friendship graph without self-loops.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<BTreeSet<UserId>>,
}

impl SocialGraph {
    pub fn with_users(n_users: usize) -> Self {
        SocialGraph {
            adjacency: vec![BTreeSet::new(); n_users],
        }
    }

    /// Adds the undirected edge `{u, v}`; self-loops are ignored.
    /// Returns `true` if the edge was new.
    pub fn add_edge(&mut self, u: UserId, v: UserId) -> bool {
        if u == v {
            return false;
        }
        let needed = u.max(v) as usize + 1;
        if self.adjacency.len() < needed {
            self.adjacency.resize(needed, BTreeSet::new());
        }
        let fresh = self.adjacency[u as usize].insert(v);
        self.adjacency[v as usize].insert(u);
        fresh
    }

    pub fn neighbors(&self, u: UserId) -> impl Iterator<Item = UserId> + '_ {
        self.adjacency
            .get(u as usize)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, u: UserId) -> usize {
        self.adjacency.get(u as usize).map_or(0, BTreeSet::len)
    }

    pub fn n_users(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, u: UserId, v: UserId) -> bool {
        self.adjacency
            .get(u as usize)
            .is_some_and(|s| s.contains(&v))
    }

    /// Each undirected edge once, as `(low, high)`, sorted.
    pub fn edges(&self) -> Vec<(UserId, UserId)> {
        let mut out = Vec::new();
        for (u, adj) in self.adjacency.iter().enumerate() {
            let u = u as UserId;
            out.extend(adj.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Group membership and group-posted transactions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupIndex {
    user_groups: BTreeMap<UserId, BTreeSet<GroupId>>,
    group_members: BTreeMap<GroupId, BTreeSet<UserId>>,
    group_transactions: BTreeMap<GroupId, Vec<TxnId>>,
}

impl GroupIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_member(&mut self, group: GroupId, user: UserId) {
        self.user_groups.entry(user).or_default().insert(group);
        self.group_members.entry(group).or_default().insert(user);
    }

    pub fn add_transaction(&mut self, group: GroupId, txn: TxnId) {
        self.group_transactions.entry(group).or_default().push(txn);
        self.group_members.entry(group).or_default();
    }

    pub fn groups_of(&self, user: UserId) -> impl Iterator<Item = GroupId> + '_ {
        self.user_groups
            .get(&user)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn members(&self, group: GroupId) -> impl Iterator<Item = UserId> + '_ {
        self.group_members
            .get(&group)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn transactions_of(&self, group: GroupId) -> &[TxnId] {
        self.group_transactions
            .get(&group)
            .map_or(&[], Vec::as_slice)
    }

    pub fn has_groups(&self, user: UserId) -> bool {
        self.user_groups.get(&user).is_some_and(|g| !g.is_empty())
    }

    /// Total transactions posted across the groups `user` belongs to.
    pub fn group_transaction_count(&self, user: UserId) -> usize {
        self.groups_of(user)
            .map(|g| self.transactions_of(g).len())
            .sum()
    }

    pub fn groups(&self) -> impl Iterator<Item = GroupId> + '_ {
        self.group_members.keys().copied()
    }

    pub fn memberships(&self) -> impl Iterator<Item = (GroupId, UserId)> + '_ {
        self.group_members
            .iter()
            .flat_map(|(&g, users)| users.iter().map(move |&u| (g, u)))
    }
}

/// A recommendation request: user `user` supplies the input tagset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub user: UserId,
    pub input: Tagset,
    pub interest: Option<InterestId>,
}

impl Query {
    pub fn new(user: UserId, input: impl Into<Tagset>) -> Self {
        Query {
            user,
            input: input.into(),
            interest: None,
        }
    }

    pub fn with_interest(mut self, interest: InterestId) -> Self {
        self.interest = Some(interest);
        self
    }
}

/// A loaded corpus with its label tables.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub db: TagDatabase,
    pub graph: SocialGraph,
    pub groups: GroupIndex,
    pub users: Interner,
    pub group_labels: Interner,
    pub interests: Interner,
}

impl Corpus {
    /// A corpus around `db` with no friendships and no groups. Users,
    /// groups and interests are labelled by their ids.
    pub fn from_db(db: TagDatabase) -> Self {
        let mut users = Interner::new();
        let mut group_labels = Interner::new();
        let mut interests = Interner::new();
        let mut groups = GroupIndex::new();
        let (mut max_user, mut max_group, mut max_interest) = (None, None, None);
        for t in db.iter() {
            max_user = max_user.max(Some(t.user));
            max_group = max_group.max(t.group);
            max_interest = max_interest.max(t.interest);
            if let Some(g) = t.group {
                groups.add_member(g, t.user);
                groups.add_transaction(g, t.id);
            }
        }
        for (table, max) in [
            (&mut users, max_user),
            (&mut group_labels, max_group),
            (&mut interests, max_interest),
        ] {
            for i in 0..max.map_or(0, |m| m + 1) {
                table.intern(&i.to_string());
            }
        }
        Corpus {
            graph: SocialGraph::with_users(users.len()),
            db,
            groups,
            users,
            group_labels,
            interests,
        }
    }

    pub fn vocabulary(&self) -> &TagVocabulary {
        self.db.vocabulary()
    }

    pub fn tag_labels<'a>(&'a self, tags: &'a Tagset) -> impl Iterator<Item = &'a str> + 'a {
        tags.iter().map(move |t| self.db.vocabulary().label(t))
    }
}
