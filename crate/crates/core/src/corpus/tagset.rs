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

use std::fmt;

use super::TagId;

/// A set of tag ids, kept sorted and free of duplicates.
///
/// Ordering is lexicographic over the sorted ids, which is the tie-break
/// order used by the miner and the code table.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tagset(Vec<TagId>);

impl Tagset {
    pub fn new() -> Self {
        Tagset(Vec::new())
    }

    /// Builds a tagset from ids that are already sorted and unique.
    pub(crate) fn from_sorted_unchecked(ids: Vec<TagId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Tagset(ids)
    }

    pub fn singleton(tag: TagId) -> Self {
        Tagset(vec![tag])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[TagId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = TagId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, tag: TagId) -> bool {
        self.0.binary_search(&tag).is_ok()
    }

    /// `true` when every tag of `self` is in `other`.
    pub fn is_subset(&self, other: &Tagset) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn is_disjoint(&self, other: &Tagset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Tagset) -> Tagset {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Tagset(out)
    }

    /// Tags of `self` that are not in `other`.
    pub fn difference(&self, other: &Tagset) -> Tagset {
        Tagset(self.0.iter().copied().filter(|t| !other.contains(*t)).collect())
    }

    pub fn with(&self, tag: TagId) -> Tagset {
        match self.0.binary_search(&tag) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut out = self.0.clone();
                out.insert(pos, tag);
                Tagset(out)
            }
        }
    }

    pub fn without(&self, tag: TagId) -> Tagset {
        Tagset(self.0.iter().copied().filter(|&t| t != tag).collect())
    }

    pub fn into_vec(self) -> Vec<TagId> {
        self.0
    }
}

pub(crate) fn is_sorted_subset(small: &[TagId], large: &[TagId]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut j = 0;
    for &t in small {
        while j < large.len() && large[j] < t {
            j += 1;
        }
        if j == large.len() || large[j] != t {
            return false;
        }
        j += 1;
    }
    true
}

impl FromIterator<TagId> for Tagset {
    fn from_iter<I: IntoIterator<Item = TagId>>(iter: I) -> Self {
        let mut v: Vec<TagId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Tagset(v)
    }
}

impl From<Vec<TagId>> for Tagset {
    fn from(v: Vec<TagId>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[TagId; N]> for Tagset {
    fn from(v: [TagId; N]) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a Tagset {
    type Item = &'a TagId;
    type IntoIter = std::slice::Iter<'a, TagId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Tagset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}
