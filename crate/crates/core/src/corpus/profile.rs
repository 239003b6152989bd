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

use std::collections::BTreeSet;

use serde::Serialize;

use super::{SocialGraph, TagDatabase};

/// Transaction-length buckets: `< 6`, `6..=8`, `> 8` tags.
pub const LENGTH_BUCKETS: [&str; 3] = ["<6", "6-8", ">8"];
/// Friend-count buckets.
pub const FRIEND_BUCKETS: [&str; 6] = ["0", "1-2", "3-10", "11-50", "51-250", ">=251"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatasetProfile {
    pub users: usize,
    pub tags: usize,
    pub transactions: usize,
    /// Percentage of transactions per length bucket, rounded to integers.
    pub length_pct: [u32; 3],
    /// Number of users (owners of at least one transaction) per friend-count bucket.
    pub friend_histogram: [usize; 6],
}

fn length_bucket(len: usize) -> usize {
    match len {
        0..=5 => 0,
        6..=8 => 1,
        _ => 2,
    }
}

fn friend_bucket(degree: usize) -> usize {
    match degree {
        0 => 0,
        1..=2 => 1,
        3..=10 => 2,
        11..=50 => 3,
        51..=250 => 4,
        _ => 5,
    }
}

fn percent(count: usize, total: usize) -> u32 {
    if total == 0 {
        0
    } else {
        (100.0 * count as f64 / total as f64).round() as u32
    }
}

pub fn profile(db: &TagDatabase, graph: &SocialGraph) -> DatasetProfile {
    let users = db.owners();
    let tags: BTreeSet<_> = db.iter().flat_map(|t| t.tags.iter()).collect();
    let mut lengths = [0usize; 3];
    for t in db.iter() {
        lengths[length_bucket(t.tags.len())] += 1;
    }
    let mut friend_histogram = [0usize; 6];
    for &u in &users {
        friend_histogram[friend_bucket(graph.degree(u))] += 1;
    }
    DatasetProfile {
        users: users.len(),
        tags: tags.len(),
        transactions: db.len(),
        length_pct: lengths.map(|c| percent(c, db.len())),
        friend_histogram,
    }
}
