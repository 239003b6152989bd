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

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;

use num_traits::Float;

use super::{CodeTable, CodeTableElement, CodeTableError};
use crate::corpus::{TagDatabase, TagId, Tagset};
use crate::miner::{FrequentTagsetCollection, VerticalIndex};

/// Two-part description length of a database under a code table, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodedSize<S> {
    /// `L(D | CT)`: the database encoded with the table's codes.
    pub data: S,
    /// `L(CT)`: each used element spelled out with singleton codes plus its own code.
    pub model: S,
}

impl<S: Float> EncodedSize<S> {
    pub fn total(&self) -> S {
        self.data + self.model
    }
}

/// Result of code table induction with the compression trace.
#[derive(Clone, Debug)]
pub struct Induction<S> {
    pub table: CodeTable,
    /// Size of the database under the singleton-only table.
    pub initial_size: S,
    /// Each accepted candidate with the total size right after accepting it.
    pub accepted: Vec<(Tagset, S)>,
    /// Size under the final table, recomputed from the final covers.
    pub final_size: S,
}

fn cast<S: Float>(x: f64) -> S {
    S::from(x).expect("float conversion")
}

fn standard_lengths<S: Float>(supports: &[usize]) -> Vec<S> {
    let total: usize = supports.iter().sum();
    supports
        .iter()
        .map(|&s| {
            if s == 0 {
                S::zero()
            } else {
                -(cast::<S>(s as f64) / cast(total as f64)).log2()
            }
        })
        .collect()
}

fn size_from_usages<S: Float>(
    usages: impl Iterator<Item = (usize, S)>,
) -> EncodedSize<S> {
    let items: Vec<(usize, S)> = usages.filter(|(u, _)| *u > 0).collect();
    let total: usize = items.iter().map(|(u, _)| u).sum();
    let total_s: S = cast(total as f64);
    let mut data = S::zero();
    let mut model = S::zero();
    for (u, spelled) in items {
        let code = -(cast::<S>(u as f64) / total_s).log2();
        data = data + cast::<S>(u as f64) * code;
        model = model + spelled + code;
    }
    EncodedSize { data, model }
}

/// Description length of `db` under `ct`, computed from scratch: every
/// transaction is covered with [`CodeTable::cover`] and usages are counted
/// afresh; the stored usages of `ct` are ignored.
pub fn encoded_size<S: Float>(
    db: &TagDatabase,
    ct: &CodeTable,
) -> Result<EncodedSize<S>, CodeTableError> {
    let index: HashMap<&Tagset, usize> = ct
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| (&e.tagset, i))
        .collect();
    let mut usage = vec![0usize; ct.len()];
    for t in db.iter() {
        for part in ct.cover(&t.tags)? {
            usage[index[&part]] += 1;
        }
    }
    let supports: Vec<usize> = (0..db.n_tags() as TagId)
        .map(|t| db.support(&Tagset::singleton(t)))
        .collect();
    let st = standard_lengths::<S>(&supports);
    Ok(size_from_usages(ct.elements().iter().zip(&usage).map(
        |(e, &u)| {
            let spelled = e
                .tagset
                .iter()
                .fold(S::zero(), |acc, t| acc + st[t as usize]);
            (u, spelled)
        },
    )))
}

struct Element<S> {
    tagset: Tagset,
    support: usize,
    usage: usize,
    spelled: S,
}

fn cover_order<S>(a: &Element<S>, b: &Element<S>) -> Ordering {
    (Reverse(a.tagset.len()), Reverse(a.support), &a.tagset).cmp(&(
        Reverse(b.tagset.len()),
        Reverse(b.support),
        &b.tagset,
    ))
}

/// Running aggregates from which the total size follows in O(1).
#[derive(Clone, Copy)]
struct Aggregates<S> {
    total_usage: usize,
    used: usize,
    /// Σ u·log2 u
    u_log_u: S,
    /// Σ log2 u over used elements
    log_u: S,
    /// Σ spelled-out length over used elements
    spelled: S,
}

impl<S: Float> Aggregates<S> {
    fn size(&self) -> S {
        if self.total_usage == 0 {
            return S::zero();
        }
        let total: S = cast(self.total_usage as f64);
        let lt = total.log2();
        total * lt - self.u_log_u + self.spelled + cast::<S>(self.used as f64) * lt - self.log_u
    }

    fn apply(&mut self, old: usize, new: usize, spelled: S) {
        let term = |u: usize| -> (S, S) {
            if u == 0 {
                (S::zero(), S::zero())
            } else {
                let us: S = cast(u as f64);
                (us * us.log2(), us.log2())
            }
        };
        let (a0, b0) = term(old);
        let (a1, b1) = term(new);
        self.u_log_u = self.u_log_u - a0 + a1;
        self.log_u = self.log_u - b0 + b1;
        self.total_usage = self.total_usage + new - old;
        match (old > 0, new > 0) {
            (false, true) => {
                self.used += 1;
                self.spelled = self.spelled + spelled;
            }
            (true, false) => {
                self.used -= 1;
                self.spelled = self.spelled - spelled;
            }
            _ => {}
        }
    }
}

struct Inducer<'a, S> {
    db: &'a TagDatabase,
    elements: Vec<Element<S>>,
    singleton: Vec<Option<u32>>,
    /// Multi-tag elements containing each tag.
    containing: Vec<Vec<u32>>,
    covers: Vec<Vec<u32>>,
    agg: Aggregates<S>,
}

impl<'a, S: Float> Inducer<'a, S> {
    fn new(db: &'a TagDatabase, index: &VerticalIndex) -> Self {
        let n_tags = db.n_tags();
        let supports: Vec<usize> = (0..n_tags as TagId).map(|t| index.tag_support(t)).collect();
        let st = standard_lengths::<S>(&supports);
        let mut elements = Vec::new();
        let mut singleton = vec![None; n_tags];
        for (t, &s) in supports.iter().enumerate() {
            if s > 0 {
                singleton[t] = Some(elements.len() as u32);
                elements.push(Element {
                    tagset: Tagset::singleton(t as TagId),
                    support: s,
                    usage: 0,
                    spelled: st[t],
                });
            }
        }
        let mut this = Inducer {
            db,
            elements,
            singleton,
            containing: vec![Vec::new(); n_tags],
            covers: Vec::with_capacity(db.len()),
            agg: Aggregates {
                total_usage: 0,
                used: 0,
                u_log_u: S::zero(),
                log_u: S::zero(),
                spelled: S::zero(),
            },
        };
        for t in db.iter() {
            let cover = this.cover(&t.tags);
            for &e in &cover {
                this.elements[e as usize].usage += 1;
            }
            this.covers.push(cover);
        }
        for e in &this.elements {
            this.agg.apply(0, e.usage, e.spelled);
        }
        this
    }

    fn cover(&self, tags: &Tagset) -> Vec<u32> {
        let mut candidates: Vec<u32> = tags
            .iter()
            .flat_map(|t| self.containing[t as usize].iter().copied())
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&e| self.elements[e as usize].tagset.is_subset(tags));
        candidates.sort_by(|&a, &b| {
            cover_order(&self.elements[a as usize], &self.elements[b as usize])
        });
        let mut rest = tags.clone();
        let mut out = Vec::new();
        for e in candidates {
            let set = &self.elements[e as usize].tagset;
            if set.is_subset(&rest) {
                rest = rest.difference(set);
                out.push(e);
            }
        }
        out.extend(rest.iter().map(|t| {
            self.singleton[t as usize].expect("every occurring tag has a singleton")
        }));
        out
    }

    /// Tries `candidate`; keeps it if the total size strictly drops.
    fn consider(&mut self, candidate: &Tagset, support: usize, index: &VerticalIndex) -> Option<S> {
        let spelled = candidate.iter().fold(S::zero(), |acc, t| {
            let e = self.singleton[t as usize].expect("candidate tags occur in the database");
            acc + self.elements[e as usize].spelled
        });
        let id = self.elements.len() as u32;
        self.elements.push(Element {
            tagset: candidate.clone(),
            support,
            usage: 0,
            spelled,
        });
        for t in candidate.iter() {
            self.containing[t as usize].push(id);
        }

        let mut delta: HashMap<u32, isize> = HashMap::new();
        let mut recovered = Vec::new();
        for row in index.cover(candidate).iter() {
            let cover = self.cover(&self.db.transactions()[row].tags);
            if !cover.contains(&id) {
                continue;
            }
            for &e in &self.covers[row] {
                *delta.entry(e).or_default() -= 1;
            }
            for &e in &cover {
                *delta.entry(e).or_default() += 1;
            }
            recovered.push((row, cover));
        }

        let mut trial = self.agg;
        if !recovered.is_empty() {
            for (&e, &d) in &delta {
                let el = &self.elements[e as usize];
                let new = (el.usage as isize + d) as usize;
                trial.apply(el.usage, new, el.spelled);
            }
        }
        let new_size = trial.size();
        if !recovered.is_empty() && new_size < self.agg.size() {
            for (e, d) in delta {
                let el = &mut self.elements[e as usize];
                el.usage = (el.usage as isize + d) as usize;
            }
            for (row, cover) in recovered {
                self.covers[row] = cover;
            }
            self.agg = trial;
            Some(new_size)
        } else {
            for t in candidate.iter() {
                self.containing[t as usize].pop();
            }
            self.elements.pop();
            None
        }
    }
}

/// Candidate order: support desc, length desc, then lexicographic.
fn candidate_order(candidates: &FrequentTagsetCollection) -> Vec<(&Tagset, usize)> {
    let mut v: Vec<(&Tagset, usize)> = candidates.iter().filter(|(s, _)| s.len() > 1).collect();
    v.sort_by(|a, b| {
        (Reverse(a.1), Reverse(a.0.len()), a.0).cmp(&(Reverse(b.1), Reverse(b.0.len()), b.0))
    });
    v
}

/// Greedy MDL code table induction, returning the compression trace.
pub fn induce_traced<S: Float>(
    db: &TagDatabase,
    candidates: &FrequentTagsetCollection,
) -> Result<Induction<S>, CodeTableError> {
    if db.is_empty() {
        return Err(CodeTableError::EmptyDatabase);
    }
    let index = VerticalIndex::new(db);
    let mut inducer = Inducer::<S>::new(db, &index);
    let initial_size = inducer.agg.size();
    let mut accepted = Vec::new();
    for (candidate, support) in candidate_order(candidates) {
        if let Some(size) = inducer.consider(candidate, support, &index) {
            accepted.push((candidate.clone(), size));
        }
    }

    // final usages from a clean pass over the database
    for e in &mut inducer.elements {
        e.usage = 0;
    }
    for t in db.iter() {
        for e in inducer.cover(&t.tags) {
            inducer.elements[e as usize].usage += 1;
        }
    }
    let mut order: Vec<usize> = (0..inducer.elements.len()).collect();
    order.sort_by(|&a, &b| cover_order(&inducer.elements[a], &inducer.elements[b]));
    let final_size = size_from_usages(
        order
            .iter()
            .map(|&i| (inducer.elements[i].usage, inducer.elements[i].spelled)),
    )
    .total();
    let elements = order
        .into_iter()
        .map(|i| CodeTableElement {
            tagset: inducer.elements[i].tagset.clone(),
            usage: inducer.elements[i].usage,
        })
        .collect();
    Ok(Induction {
        table: CodeTable::from_elements(elements, db.len()),
        initial_size,
        accepted,
        final_size,
    })
}

/// Induces a code table for `db` from the candidate tagsets.
pub fn induce(
    db: &TagDatabase,
    candidates: &FrequentTagsetCollection,
) -> Result<CodeTable, CodeTableError> {
    induce_traced::<f64>(db, candidates).map(|i| i.table)
}
