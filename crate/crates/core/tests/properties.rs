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

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use socialtag::codetable::{induce, induce_traced};
use socialtag::corpus::{
    parse_corpus, write_graph, write_groups, write_transactions, GroupIndex, LoadOptions, Query,
    SocialGraph, TagDatabase, Tagset,
};
use socialtag::eval::score;
use socialtag::miner::{build_cooccurrence, mine_closed, Closedness, MinSupport, MiningParams};
use socialtag::social::{
    build_batched, build_personomy, build_social_personomy, build_uk, nth_degree_users,
    route_community, Batch, BatchReason, Fallback,
};
use socialtag::synth::{generate, SynthConfig};

fn db_from_seed(seed: u64, n_tags: usize, max_txns: usize) -> TagDatabase {
    random_db(&mut ChaCha8Rng::seed_from_u64(seed), n_tags, max_txns, 6)
}

fn random_graph(seed: u64, n: usize, p: f64) -> SocialGraph {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SocialGraph::with_users(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u as u32, v as u32);
            }
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mining_matches_definition(seed in any::<u64>(), minsup in 1usize..4, max_len in 1usize..5, global in any::<bool>()) {
        let db = db_from_seed(seed, 8, 25);
        let closedness = if global { Closedness::Global } else { Closedness::LengthBounded };
        let mut params = MiningParams::new(MinSupport::Absolute(minsup), max_len);
        params.closedness = closedness;
        let f = mine_closed(&db, &params).unwrap();
        let got: Vec<(Vec<u32>, usize)> = f.iter().map(|(x, s)| (x.as_slice().to_vec(), s)).collect();
        let want: Vec<(Vec<u32>, usize)> = brute_closed(&db, minsup, max_len, closedness).into_iter().collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn support_is_anti_monotone(seed in any::<u64>(), a in proptest::collection::btree_set(0u32..8, 1..4), extra in 0u32..8) {
        let db = db_from_seed(seed, 8, 30);
        let x = Tagset::from_iter(a);
        let y = x.with(extra);
        prop_assert!(db.support(&y) <= db.support(&x));
        let f = mine_closed(&db, &MiningParams::new(MinSupport::Absolute(1), 4)).unwrap();
        if let (Some(sx), Some(sy)) = (f.derived_support(&x), f.derived_support(&y)) {
            prop_assert!(sy <= sx);
        }
    }

    #[test]
    fn top_lists_hold_exact_joint_counts(seed in any::<u64>(), top_m in 1usize..6) {
        let db = db_from_seed(seed, 10, 30);
        let index = build_cooccurrence(&db, top_m).unwrap();
        let brute = brute_top_lists(&db, top_m);
        for t in 0..db.n_tags() as u32 {
            prop_assert_eq!(index.tag_support(t), scan_support(&db, &Tagset::singleton(t)));
            let want = brute.get(&t).cloned().unwrap_or_default();
            prop_assert_eq!(index.top_list(t).to_vec(), want);
            for &(c, joint) in index.top_list(t) {
                prop_assert_eq!(joint, scan_support(&db, &Tagset::from([t, c])));
            }
        }
    }

    #[test]
    fn covers_are_exact_and_estimates_bounded(seed in any::<u64>(), probes in proptest::collection::vec(proptest::collection::btree_set(0u32..10, 1..4), 1..30)) {
        let db = db_from_seed(seed, 10, 35);
        let f = mine_closed(&db, &MiningParams::new(MinSupport::Absolute(1), 3)).unwrap();
        let ct = induce(&db, &f).unwrap();
        for t in db.iter() {
            let cover = ct.cover(&t.tags).unwrap();
            let mut union = BTreeSet::new();
            for part in &cover {
                for tag in part.iter() {
                    prop_assert!(union.insert(tag), "overlapping cover");
                }
            }
            prop_assert_eq!(union.into_iter().collect::<Tagset>(), t.tags.clone());
        }
        for p in probes {
            let x = Tagset::from_iter(p);
            prop_assert!(ct.estimate_support(&x) <= db.support(&x));
        }
        let trace = induce_traced::<f64>(&db, &f).unwrap();
        let mut last = trace.initial_size;
        for (_, size) in &trace.accepted {
            prop_assert!(*size < last);
            last = *size;
        }
    }

    #[test]
    fn metrics_match_naive(ranked in proptest::collection::btree_set(0u32..12, 0..8), truth in proptest::collection::btree_set(0u32..12, 1..5), order_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut ranked: Vec<u32> = ranked.into_iter().collect();
        ranked.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
        let truth_vec: Vec<u32> = truth.iter().copied().collect();
        let ranks = [1, 3, 5];
        let got = score::<Exact>(&ranked, &Tagset::from_iter(truth), &ranks);
        let (p, s, rr) = naive_metrics(&ranked, &truth_vec, &ranks);
        prop_assert_eq!(got.p, p);
        prop_assert_eq!(got.s.clone(), s);
        prop_assert_eq!(got.rr, rr);
        prop_assert!(got.s.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degree_is_monotone(seed in any::<u64>(), u in 0u32..20, n in 0usize..4) {
        let g = random_graph(seed, 20, 0.1);
        let near = nth_degree_users(&g, u, n);
        let far = nth_degree_users(&g, u, n + 1);
        prop_assert!(near.is_subset(&far));
        prop_assert!(near.contains(&u));
        let db = TagDatabase::from_tagsets((0..40u32).map(|i| vec![i % 5, 5 + i % 3]));
        let rows: Vec<_> = db.transactions().iter().cloned().map(|mut t| { t.user %= 20; t }).collect();
        let db = TagDatabase::new(db.vocabulary().clone(), rows);
        let small = build_social_personomy(&db, &g, u, n).instance_ids();
        let big = build_social_personomy(&db, &g, u, n + 1).instance_ids();
        prop_assert!(small.iter().all(|i| big.contains(i)));
        let q = Query::new(u, [0]);
        prop_assert!(build_uk(&db, &g, &q, n).len() <= build_uk(&db, &g, &q, n + 1).len());
        let batch = Batch { queries: vec![q.clone(), Query::new((u + 7) % 20, [1])], reason: BatchReason::Flush };
        let bu = build_batched(&db, &g, &batch, None, Fallback::default());
        let b1 = build_batched(&db, &g, &batch, Some(n), Fallback::default());
        if !bu.fell_back {
            let ids = b1.db.instance_ids();
            prop_assert!(bu.db.instance_ids().iter().all(|i| ids.contains(i)));
        }
        // selections never invent transactions
        let all: BTreeSet<u32> = db.instance_ids().into_iter().collect();
        prop_assert!(b1.db.instance_ids().iter().all(|i| all.contains(i)));
        prop_assert!(build_personomy(&db, u).iter().all(|t| t.user == u));
    }

    #[test]
    fn routing_is_a_stable_partition(members in proptest::collection::vec((0u32..4, 0u32..15), 0..20), users in proptest::collection::vec(0u32..15, 0..25)) {
        let mut groups = GroupIndex::new();
        for (g, u) in &members {
            groups.add_member(*g, *u);
            groups.add_transaction(*g, *u);
        }
        let queries: Vec<Query> = users.iter().map(|&u| Query::new(u, [0])).collect();
        let (grouped, ungrouped) = route_community(&queries, &groups, 1);
        prop_assert_eq!(grouped.len() + ungrouped.len(), queries.len());
        let expect_grouped: Vec<Query> = queries.iter().filter(|q| groups.has_groups(q.user)).cloned().collect();
        let expect_ungrouped: Vec<Query> = queries.iter().filter(|q| !groups.has_groups(q.user)).cloned().collect();
        prop_assert_eq!(grouped, expect_grouped);
        prop_assert_eq!(ungrouped, expect_ungrouped);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn corpus_text_round_trips(seed in any::<u64>()) {
        let cfg = SynthConfig { users: 30, casual_users: 10, group_count: 3, seed, ..SynthConfig::default() };
        let corpus = generate(&cfg).unwrap();
        let tx = write_transactions(&corpus);
        let graph = write_graph(&corpus);
        let groups = write_groups(&corpus);
        let (back, report) = parse_corpus(&tx, Some(&graph), Some(&groups), LoadOptions::default()).unwrap();
        prop_assert_eq!(report.dropped_short, 0);
        prop_assert_eq!(back.db.len(), corpus.db.len());
        prop_assert_eq!(back.graph.n_edges(), corpus.graph.n_edges());
        prop_assert_eq!(write_transactions(&back), tx);
        prop_assert_eq!(write_graph(&back), graph);
        prop_assert_eq!(write_groups(&back), groups);
    }
}
