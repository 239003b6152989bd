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

//! Per-query ranking metrics.

use std::collections::HashSet;

use crate::corpus::{TagId, Tagset};
use crate::scalar::Score;

pub const DEFAULT_RANKS: [usize; 3] = [1, 3, 5];

/// Metrics of one ranked list against its ground truth, `p[i]` and `s[i]`
/// at `ranks[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryScore<S> {
    pub p: Vec<S>,
    pub s: Vec<S>,
    pub rr: S,
}

/// Precision and success at each rank, and the reciprocal rank of the first
/// hit anywhere in `ranked`. Precision divides by the rank even when the
/// list is shorter.
pub fn score<S: Score>(ranked: &[TagId], truth: &Tagset, ranks: &[usize]) -> QueryScore<S> {
    let mut p = Vec::with_capacity(ranks.len());
    let mut s = Vec::with_capacity(ranks.len());
    for &r in ranks {
        let hits = ranked.iter().take(r).filter(|t| truth.contains(**t)).count();
        p.push(if r == 0 { S::zero() } else { S::ratio(hits, r) });
        s.push(if hits > 0 { S::one() } else { S::zero() });
    }
    let rr = ranked
        .iter()
        .position(|t| truth.contains(*t))
        .map_or(S::zero(), |i| S::ratio(1, i + 1));
    QueryScore { p, s, rr }
}

/// Running sums of query scores.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct MetricSums {
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub rr: f64,
    pub n: usize,
}

impl MetricSums {
    pub fn new(n_ranks: usize) -> Self {
        MetricSums {
            p: vec![0.0; n_ranks],
            s: vec![0.0; n_ranks],
            rr: 0.0,
            n: 0,
        }
    }

    pub fn add(&mut self, q: &QueryScore<f64>) {
        for (acc, v) in self.p.iter_mut().zip(&q.p) {
            *acc += v;
        }
        for (acc, v) in self.s.iter_mut().zip(&q.s) {
            *acc += v;
        }
        self.rr += q.rr;
        self.n += 1;
    }

    pub fn means(&self) -> (Vec<f64>, Vec<f64>, f64) {
        let d = self.n.max(1) as f64;
        (
            self.p.iter().map(|v| v / d).collect(),
            self.s.iter().map(|v| v / d).collect(),
            self.rr / d,
        )
    }
}

/// True when `ranked` has no repeated tag.
pub fn is_ranking(ranked: &[TagId]) -> bool {
    let mut seen = HashSet::new();
    ranked.iter().all(|t| seen.insert(*t))
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    type Exact = Ratio<i64>;

    #[test]
    fn worked_example() {
        // [c,b,d] against {b}
        let q: QueryScore<Exact> = score(&[2, 1, 3], &Tagset::from([1]), &[1, 3]);
        assert_eq!(q.p, vec![Exact::from_integer(0), Exact::new(1, 3)]);
        assert_eq!(q.s, vec![Exact::from_integer(0), Exact::from_integer(1)]);
        assert_eq!(q.rr, Exact::new(1, 2));
    }

    #[test]
    fn empty_list_scores_zero() {
        let q: QueryScore<f64> = score(&[], &Tagset::from([1]), &DEFAULT_RANKS);
        assert_eq!(q.p, vec![0.0; 3]);
        assert_eq!(q.s, vec![0.0; 3]);
        assert_eq!(q.rr, 0.0);
    }

    #[test]
    fn top_hit() {
        let q: QueryScore<f64> = score(&[4, 5], &Tagset::from([4]), &[1]);
        assert_eq!((q.p[0], q.s[0], q.rr), (1.0, 1.0, 1.0));
    }

    #[test]
    fn reciprocal_rank_looks_past_cutoffs() {
        let q: QueryScore<f64> = score(&[0, 1, 2, 3, 4, 5, 6], &Tagset::from([6]), &[1, 3, 5]);
        assert_eq!(q.s, vec![0.0; 3]);
        assert!((q.rr - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn sums_average() {
        let mut m = MetricSums::new(1);
        m.add(&score(&[1], &Tagset::from([1]), &[1]));
        m.add(&score(&[2], &Tagset::from([1]), &[1]));
        assert_eq!(m.means(), (vec![0.5], vec![0.5], 0.5));
        assert!(is_ranking(&[1, 2]));
        assert!(!is_ranking(&[1, 2, 1]));
    }
}
