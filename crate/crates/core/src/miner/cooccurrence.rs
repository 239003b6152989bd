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

use rayon::prelude::*;

use super::MinerError;
use crate::corpus::{TagDatabase, TagId};

/// Tag supports plus, for every tag, its `top_m` most frequent partners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CooccurrenceIndex {
    top_m: usize,
    n_transactions: usize,
    tag_support: Vec<usize>,
    top_lists: Vec<Vec<(TagId, usize)>>,
}

impl CooccurrenceIndex {
    pub(crate) fn from_parts(
        top_m: usize,
        n_transactions: usize,
        tag_support: Vec<usize>,
        top_lists: Vec<Vec<(TagId, usize)>>,
    ) -> Self {
        CooccurrenceIndex {
            top_m,
            n_transactions,
            tag_support,
            top_lists,
        }
    }

    pub fn top_m(&self) -> usize {
        self.top_m
    }

    pub fn n_transactions(&self) -> usize {
        self.n_transactions
    }

    pub fn n_tags(&self) -> usize {
        self.tag_support.len()
    }

    pub fn tag_support(&self, tag: TagId) -> usize {
        self.tag_support.get(tag as usize).copied().unwrap_or(0)
    }

    /// Partners of `tag`, joint count descending then tag id ascending.
    pub fn top_list(&self, tag: TagId) -> &[(TagId, usize)] {
        self.top_lists.get(tag as usize).map_or(&[], Vec::as_slice)
    }

    /// Joint count of `{tag, other}` if `other` made `tag`'s top list.
    pub fn joint_in_top(&self, tag: TagId, other: TagId) -> Option<usize> {
        self.top_list(tag)
            .iter()
            .find(|(c, _)| *c == other)
            .map(|(_, n)| *n)
    }

    /// Number of stored pairs.
    pub fn n_pairs(&self) -> usize {
        self.top_lists.iter().map(Vec::len).sum()
    }
}

pub fn build_cooccurrence(db: &TagDatabase, top_m: usize) -> Result<CooccurrenceIndex, MinerError> {
    if top_m == 0 {
        return Err(MinerError::InvalidParams("top_m must be at least 1".into()));
    }
    let n_tags = db.n_tags();
    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); n_tags];
    for (i, t) in db.iter().enumerate() {
        for tag in t.tags.iter() {
            postings[tag as usize].push(i as u32);
        }
    }
    let transactions = db.transactions();
    let top_lists = (0..n_tags)
        .into_par_iter()
        .map_init(
            || vec![0usize; n_tags],
            |counts, t| {
                let mut touched = Vec::new();
                for &i in &postings[t] {
                    for c in transactions[i as usize].tags.iter() {
                        if c as usize != t {
                            if counts[c as usize] == 0 {
                                touched.push(c);
                            }
                            counts[c as usize] += 1;
                        }
                    }
                }
                let mut list: Vec<(TagId, usize)> = touched
                    .into_iter()
                    .map(|c| {
                        let n = counts[c as usize];
                        counts[c as usize] = 0;
                        (c, n)
                    })
                    .collect();
                list.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                list.truncate(top_m);
                list
            },
        )
        .collect();
    let tag_support = postings.iter().map(Vec::len).collect();
    Ok(CooccurrenceIndex::from_parts(
        top_m,
        db.len(),
        tag_support,
        top_lists,
    ))
}
