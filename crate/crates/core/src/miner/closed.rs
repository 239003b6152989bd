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

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::{Closedness, MinerError, MiningParams, TidSet, VerticalIndex};
use crate::corpus::{TagDatabase, TagId, Tagset};

/// Closed frequent tagsets with their supports.
#[derive(Clone, Debug)]
pub struct FrequentTagsetCollection {
    entries: Vec<(Tagset, usize)>,
    lookup: HashMap<Tagset, usize>,
    by_tag: HashMap<TagId, Vec<u32>>,
    params: MiningParams,
    min_support: usize,
}

impl PartialEq for FrequentTagsetCollection {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
            && self.params == other.params
            && self.min_support == other.min_support
    }
}

impl FrequentTagsetCollection {
    /// Wraps already-mined entries; they are sorted here.
    pub fn from_entries(
        mut entries: Vec<(Tagset, usize)>,
        params: MiningParams,
        min_support: usize,
    ) -> Self {
        entries.sort();
        let lookup = entries.iter().cloned().collect();
        let mut by_tag: HashMap<TagId, Vec<u32>> = HashMap::new();
        for (i, (set, _)) in entries.iter().enumerate() {
            for t in set.iter() {
                by_tag.entry(t).or_default().push(i as u32);
            }
        }
        FrequentTagsetCollection {
            entries,
            lookup,
            by_tag,
            params,
            min_support,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by tagset.
    pub fn iter(&self) -> impl Iterator<Item = (&Tagset, usize)> + '_ {
        self.entries.iter().map(|(s, c)| (s, *c))
    }

    pub fn params(&self) -> &MiningParams {
        &self.params
    }

    /// The absolute support threshold the collection was mined with.
    pub fn min_support(&self) -> usize {
        self.min_support
    }

    /// Support of `x` if `x` itself is in the collection.
    pub fn get(&self, x: &Tagset) -> Option<usize> {
        self.lookup.get(x).copied()
    }

    /// Support of any frequent `x` with `|x| <= max_len`, recovered from the
    /// collection: the largest support among stored supersets of `x`.
    ///
    /// Exact for frequent tagsets because every such tagset has a closed
    /// superset of equal support within the length bound. `None` when no
    /// stored tagset contains `x` (i.e. `x` is infrequent).
    pub fn derived_support(&self, x: &Tagset) -> Option<usize> {
        if let Some(s) = self.get(x) {
            return Some(s);
        }
        let postings = x
            .iter()
            .map(|t| self.by_tag.get(&t).map_or(&[][..], Vec::as_slice))
            .min_by_key(|p| p.len())?;
        postings
            .iter()
            .map(|&i| &self.entries[i as usize])
            .filter(|(set, _)| x.is_subset(set))
            .map(|(_, c)| *c)
            .max()
    }
}

fn extend(
    prefix: &mut Vec<TagId>,
    tails: &[(TagId, TidSet)],
    min_support: usize,
    max_len: usize,
    out: &mut Vec<(Tagset, usize)>,
) {
    for (i, (tag, tids)) in tails.iter().enumerate() {
        prefix.push(*tag);
        out.push((
            Tagset::from_sorted_unchecked(prefix.clone()),
            tids.count(),
        ));
        if prefix.len() < max_len {
            let children: Vec<(TagId, TidSet)> = tails[i + 1..]
                .iter()
                .filter_map(|(other, other_tids)| {
                    let joint = tids.intersect(other_tids);
                    (joint.count() >= min_support).then_some((*other, joint))
                })
                .collect();
            if !children.is_empty() {
                extend(prefix, &children, min_support, max_len, out);
            }
        }
        prefix.pop();
    }
}

/// All frequent tagsets with `|X| <= max_len`, unsorted.
pub(crate) fn mine_frequent(
    index: &VerticalIndex,
    n_tags: usize,
    min_support: usize,
    max_len: usize,
) -> Vec<(Tagset, usize)> {
    let singles: Vec<(TagId, TidSet)> = (0..n_tags as TagId)
        .filter(|&t| index.tag_support(t) >= min_support)
        .map(|t| (t, index.tids(t).clone()))
        .collect();
    (0..singles.len())
        .into_par_iter()
        .map(|i| {
            let (tag, tids) = &singles[i];
            let mut prefix = Vec::with_capacity(max_len);
            prefix.push(*tag);
            let mut out = vec![(Tagset::singleton(*tag), tids.count())];
            if max_len > 1 {
                let children: Vec<(TagId, TidSet)> = singles[i + 1..]
                    .iter()
                    .filter_map(|(other, other_tids)| {
                        let joint = tids.intersect(other_tids);
                        (joint.count() >= min_support).then_some((*other, joint))
                    })
                    .collect();
                extend(&mut prefix, &children, min_support, max_len, &mut out);
            }
            out
        })
        .flatten()
        .collect()
}

/// Mines the closed frequent tagsets of `db` under `params`.
pub fn mine_closed(
    db: &TagDatabase,
    params: &MiningParams,
) -> Result<FrequentTagsetCollection, MinerError> {
    params.validate()?;
    let min_support = params.min_support.to_absolute(db.len());
    let index = VerticalIndex::new(db);
    let frequent = mine_frequent(&index, db.n_tags(), min_support, params.max_len);

    let closed = match params.closedness {
        Closedness::LengthBounded => {
            let supports: HashMap<&Tagset, usize> =
                frequent.iter().map(|(s, c)| (s, *c)).collect();
            let mut absorbed: HashSet<Tagset> = HashSet::new();
            for (set, sup) in &frequent {
                if set.len() < 2 {
                    continue;
                }
                for t in set.iter() {
                    let sub = set.without(t);
                    if supports.get(&sub) == Some(sup) {
                        absorbed.insert(sub);
                    }
                }
            }
            frequent
                .into_iter()
                .filter(|(s, _)| !absorbed.contains(s))
                .collect()
        }
        Closedness::Global => {
            let items: Vec<TagId> = (0..db.n_tags() as TagId)
                .filter(|&t| index.tag_support(t) >= min_support)
                .collect();
            frequent
                .into_par_iter()
                .filter(|(set, sup)| {
                    let tids = index.cover(set);
                    !items.iter().any(|&j| {
                        !set.contains(j) && index.tids(j).intersect_count(&tids) == *sup
                    })
                })
                .collect()
        }
    };
    Ok(FrequentTagsetCollection::from_entries(
        closed,
        *params,
        min_support,
    ))
}
