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

//! Vertical (tag → transaction bitset) layout for support counting.

use crate::corpus::{TagDatabase, TagId, Tagset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TidSet {
    words: Vec<u64>,
}

impl TidSet {
    pub fn empty(n_transactions: usize) -> Self {
        TidSet {
            words: vec![0; n_transactions.div_ceil(64)],
        }
    }

    pub fn full(n_transactions: usize) -> Self {
        let mut s = Self::empty(n_transactions);
        for i in 0..n_transactions {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect(&self, other: &TidSet) -> TidSet {
        TidSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn intersect_count(&self, other: &TidSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }
}

/// Per-tag transaction bitsets over one database.
#[derive(Clone, Debug)]
pub struct VerticalIndex {
    n_transactions: usize,
    tids: Vec<TidSet>,
}

impl VerticalIndex {
    pub fn new(db: &TagDatabase) -> Self {
        let n = db.len();
        let mut tids = vec![TidSet::empty(n); db.n_tags()];
        for (i, t) in db.iter().enumerate() {
            for tag in t.tags.iter() {
                tids[tag as usize].insert(i);
            }
        }
        VerticalIndex {
            n_transactions: n,
            tids,
        }
    }

    pub fn n_transactions(&self) -> usize {
        self.n_transactions
    }

    pub fn tids(&self, tag: TagId) -> &TidSet {
        &self.tids[tag as usize]
    }

    pub fn tag_support(&self, tag: TagId) -> usize {
        self.tids.get(tag as usize).map_or(0, TidSet::count)
    }

    /// Transactions containing every tag of `x` (all transactions for `x = ∅`).
    pub fn cover(&self, x: &Tagset) -> TidSet {
        let mut tags = x.iter();
        let Some(first) = tags.next() else {
            return TidSet::full(self.n_transactions);
        };
        let Some(init) = self.tids.get(first as usize) else {
            return TidSet::empty(self.n_transactions);
        };
        let mut acc = init.clone();
        for t in tags {
            match self.tids.get(t as usize) {
                Some(s) => acc = acc.intersect(s),
                None => return TidSet::empty(self.n_transactions),
            }
        }
        acc
    }

    pub fn support(&self, x: &Tagset) -> usize {
        match x.len() {
            0 => self.n_transactions,
            1 => self.tag_support(x.as_slice()[0]),
            2 => {
                let s = x.as_slice();
                match (self.tids.get(s[0] as usize), self.tids.get(s[1] as usize)) {
                    (Some(a), Some(b)) => a.intersect_count(b),
                    _ => 0,
                }
            }
            _ => self.cover(x).count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tidset_iterates_set_bits() {
        let mut s = TidSet::empty(130);
        for i in [0, 63, 64, 129] {
            s.insert(i);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(s.count(), 4);
        assert!(s.contains(64));
        assert!(!s.contains(65));
    }

    #[test]
    fn vertical_support_matches_scan() {
        let db = TagDatabase::from_tagsets([vec![0, 1, 2], vec![0, 1], vec![1, 2]]);
        let v = VerticalIndex::new(&db);
        for x in [vec![], vec![0], vec![0, 1], vec![0, 1, 2], vec![2, 1]] {
            let x = Tagset::from(x);
            assert_eq!(v.support(&x), db.support(&x), "{x:?}");
        }
        assert_eq!(v.support(&Tagset::from([9])), 0);
    }
}
