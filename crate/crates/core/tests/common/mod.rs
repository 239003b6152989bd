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

//! Brute-force reference implementations and random fixtures.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::Rng;

use socialtag::corpus::{TagDatabase, TagId, Tagset};
use socialtag::miner::Closedness;

pub type Exact = Ratio<i64>;

/// A database of up to `max_txns` transactions over `n_tags` tags, each
/// transaction with 1..=max_len distinct tags. Skewed so that low ids are
/// common.
pub fn random_db<R: Rng>(rng: &mut R, n_tags: usize, max_txns: usize, max_len: usize) -> TagDatabase {
    let n = rng.random_range(1..=max_txns);
    let rows: Vec<Vec<TagId>> = (0..n)
        .map(|_| {
            let len = rng.random_range(1..=max_len.min(n_tags));
            let mut tags = BTreeSet::new();
            while tags.len() < len {
                let a = rng.random_range(0..n_tags);
                let b = rng.random_range(0..n_tags);
                tags.insert(a.min(b) as TagId);
            }
            tags.into_iter().collect()
        })
        .collect();
    TagDatabase::from_tagsets(rows)
}

pub fn random_subset<R: Rng>(rng: &mut R, n_tags: usize, len: usize) -> Tagset {
    sample(rng, n_tags, len.min(n_tags)).iter().map(|i| i as TagId).collect()
}

pub fn scan_support(db: &TagDatabase, x: &Tagset) -> usize {
    db.iter().filter(|t| x.is_subset(&t.tags)).count()
}

/// Every non-empty subset of the tags in use, with its support.
pub fn all_supports(db: &TagDatabase) -> BTreeMap<Vec<TagId>, usize> {
    let tags: Vec<TagId> = db
        .iter()
        .flat_map(|t| t.tags.iter())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(tags.len() <= 16, "too many tags for enumeration");
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << tags.len()) {
        let x: Vec<TagId> = (0..tags.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| tags[i])
            .collect();
        let s = scan_support(db, &Tagset::from(x.clone()));
        out.insert(x, s);
    }
    out
}

fn is_proper_subset(a: &[TagId], b: &[TagId]) -> bool {
    a.len() < b.len() && a.iter().all(|t| b.contains(t))
}

/// Closed frequent tagsets by definition.
pub fn brute_closed(
    db: &TagDatabase,
    min_support: usize,
    max_len: usize,
    closedness: Closedness,
) -> BTreeMap<Vec<TagId>, usize> {
    let all = all_supports(db);
    all.iter()
        .filter(|(x, &s)| s >= min_support && s > 0 && x.len() <= max_len)
        .filter(|(x, &s)| {
            !all.iter().any(|(y, &t)| {
                t == s
                    && is_proper_subset(x, y)
                    && match closedness {
                        Closedness::LengthBounded => y.len() <= max_len,
                        Closedness::Global => true,
                    }
            })
        })
        .map(|(x, &s)| (x.clone(), s))
        .collect()
}

/// Pairwise top lists: for each tag, co-occurring tags by joint count
/// descending then id, cut at `top_m`.
pub fn brute_top_lists(db: &TagDatabase, top_m: usize) -> BTreeMap<TagId, Vec<(TagId, usize)>> {
    let mut joint: BTreeMap<(TagId, TagId), usize> = BTreeMap::new();
    for t in db.iter() {
        for a in t.tags.iter() {
            for b in t.tags.iter() {
                if a != b {
                    *joint.entry((a, b)).or_default() += 1;
                }
            }
        }
    }
    let mut lists: BTreeMap<TagId, Vec<(TagId, usize)>> = BTreeMap::new();
    for ((a, b), n) in joint {
        lists.entry(a).or_default().push((b, n));
    }
    for l in lists.values_mut() {
        l.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        l.truncate(top_m);
    }
    lists
}

/// Conditional-probability scores straight from the definition: for every
/// non-empty `X ⊆ I` with `|X| <= max_len - 1`, add `sup(X ∪ {c}) / sup(X)`.
/// Single-tag antecedents only count pairs in that tag's top list;
/// longer ones only count when `X ∪ {c}` is frequent. Candidates are the
/// tags appearing in the input tags' top lists.
pub fn brute_nar(
    db: &TagDatabase,
    input: &Tagset,
    min_support: usize,
    max_len: usize,
    top_m: usize,
) -> BTreeMap<TagId, Exact> {
    let top = brute_top_lists(db, top_m);
    let inputs: Vec<TagId> = input.iter().collect();
    let mut scores: BTreeMap<TagId, Exact> = BTreeMap::new();
    // only tags in some input tag's top list are ever scored
    let candidates: BTreeSet<TagId> = inputs
        .iter()
        .filter_map(|t| top.get(t))
        .flatten()
        .map(|(c, _)| *c)
        .filter(|c| !input.contains(*c))
        .collect();
    for mask in 1u32..(1 << inputs.len()) {
        let x: Tagset = (0..inputs.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| inputs[i])
            .collect();
        if x.len() + 1 > max_len {
            continue;
        }
        let sx = scan_support(db, &x);
        for &c in &candidates {
            let term = if x.len() == 1 {
                let t = x.as_slice()[0];
                top.get(&t)
                    .and_then(|l| l.iter().find(|(d, _)| *d == c))
                    .map(|(_, j)| Exact::new(*j as i64, sx as i64))
            } else {
                let sxc = scan_support(db, &x.with(c));
                (sxc >= min_support && sxc > 0).then(|| Exact::new(sxc as i64, sx as i64))
            };
            if let Some(term) = term {
                *scores.entry(c).or_insert_with(|| Exact::from_integer(0)) += term;
            }
        }
    }
    scores.retain(|_, v| *v > Exact::from_integer(0));
    scores
}

/// Ranked by score, then tag support, then id.
pub fn brute_rank(db: &TagDatabase, scores: &BTreeMap<TagId, Exact>, limit: usize) -> Vec<(TagId, Exact)> {
    let mut v: Vec<(TagId, Exact)> = scores.iter().map(|(t, s)| (*t, *s)).collect();
    v.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| {
                scan_support(db, &Tagset::singleton(b.0)).cmp(&scan_support(db, &Tagset::singleton(a.0)))
            })
            .then(a.0.cmp(&b.0))
    });
    v.truncate(limit);
    v
}

/// Precision, success and reciprocal rank by direct counting.
pub fn naive_metrics(ranked: &[TagId], truth: &[TagId], ranks: &[usize]) -> (Vec<Exact>, Vec<Exact>, Exact) {
    let mut p = Vec::new();
    let mut s = Vec::new();
    for &r in ranks {
        let mut hits = 0;
        for (i, t) in ranked.iter().enumerate() {
            if i < r && truth.contains(t) {
                hits += 1;
            }
        }
        p.push(Exact::new(hits, r as i64));
        s.push(Exact::from_integer(if hits > 0 { 1 } else { 0 }));
    }
    let mut rr = Exact::from_integer(0);
    for (i, t) in ranked.iter().enumerate() {
        if truth.contains(t) {
            rr = Exact::new(1, i as i64 + 1);
            break;
        }
    }
    (p, s, rr)
}

/// Small hand-made databases with known structure.
pub fn hand_fixtures() -> Vec<TagDatabase> {
    vec![
        TagDatabase::from_tagsets([vec![0, 1], vec![0, 2], vec![0, 2], vec![1, 2]]),
        TagDatabase::from_tagsets([vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 3], vec![0, 3]]),
        TagDatabase::from_tagsets([vec![0, 1, 4], vec![0, 1, 4], vec![0, 1, 5], vec![0, 5]]),
        TagDatabase::from_tagsets([
            vec![0, 1, 2, 3],
            vec![0, 1, 2],
            vec![2, 3, 4],
            vec![4, 5],
            vec![0, 5],
            vec![1, 3, 5],
        ]),
    ]
}
