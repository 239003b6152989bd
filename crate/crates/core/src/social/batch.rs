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

//! Grouping queries into batches that share one mined model.
//!
//! A batch closes when it holds `max_queries` queries or when `max_wait`
//! has passed since its first query arrived, whichever comes first.
//! [`form_batches`] replays timestamped arrivals against a virtual clock;
//! [`batch_queue`] does the same live, for producers on other threads.

use std::fmt;
use std::sync::mpsc::{self, RecvTimeoutError};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::Query;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPolicy {
    pub max_queries: usize,
    /// `None` waits indefinitely.
    pub max_wait: Option<Duration>,
}

impl BatchPolicy {
    pub fn new(max_queries: usize, max_wait: Option<Duration>) -> Result<Self, String> {
        if max_queries == 0 {
            return Err("max_queries must be at least 1".into());
        }
        if max_wait == Some(Duration::ZERO) {
            return Err("max_wait must be positive".into());
        }
        Ok(BatchPolicy {
            max_queries,
            max_wait,
        })
    }

    /// One batch for everything.
    pub fn unbounded() -> Self {
        BatchPolicy {
            max_queries: usize::MAX,
            max_wait: None,
        }
    }

    pub fn of_size(max_queries: usize) -> Self {
        BatchPolicy {
            max_queries: max_queries.max(1),
            max_wait: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BatchReason {
    MaxCount,
    MaxWait,
    /// The stream ended with queries still pending.
    Flush,
}

impl fmt::Display for BatchReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BatchReason::MaxCount => "MAX_COUNT",
            BatchReason::MaxWait => "MAX_WAIT",
            BatchReason::Flush => "FLUSH",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub queries: Vec<Query>,
    pub reason: BatchReason,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// Batches for arrivals given as offsets from a common start. Arrivals
/// must be in non-decreasing time order. A query arriving exactly at the
/// pending batch's deadline finds that batch already closed.
pub fn form_batches<I>(arrivals: I, policy: BatchPolicy) -> Vec<Batch>
where
    I: IntoIterator<Item = (Duration, Query)>,
{
    let mut out = Vec::new();
    let mut pending: Vec<Query> = Vec::new();
    let mut deadline: Option<Duration> = None;
    let mut last = Duration::ZERO;
    for (at, query) in arrivals {
        debug_assert!(at >= last, "arrivals out of order");
        last = at;
        if let Some(d) = deadline {
            if at >= d {
                out.push(Batch {
                    queries: std::mem::take(&mut pending),
                    reason: BatchReason::MaxWait,
                });
                deadline = None;
            }
        }
        if pending.is_empty() {
            deadline = policy.max_wait.map(|w| at + w);
        }
        pending.push(query);
        if pending.len() >= policy.max_queries {
            out.push(Batch {
                queries: std::mem::take(&mut pending),
                reason: BatchReason::MaxCount,
            });
            deadline = None;
        }
    }
    if !pending.is_empty() {
        out.push(Batch {
            queries: pending,
            reason: BatchReason::Flush,
        });
    }
    out
}

/// Producer side of a live batch queue. Cloneable; the queue flushes and
/// ends once every sender is dropped.
#[derive(Clone, Debug)]
pub struct QuerySender {
    tx: mpsc::Sender<Query>,
}

impl QuerySender {
    /// Fails only when the receiver has gone away.
    pub fn send(&self, query: Query) -> Result<(), Query> {
        self.tx.send(query).map_err(|e| e.0)
    }
}

/// Consumer side of a live batch queue.
#[derive(Debug)]
pub struct BatchReceiver {
    rx: mpsc::Receiver<Query>,
    policy: BatchPolicy,
}

pub fn batch_queue(policy: BatchPolicy) -> (QuerySender, BatchReceiver) {
    let (tx, rx) = mpsc::channel();
    (QuerySender { tx }, BatchReceiver { rx, policy })
}

impl BatchReceiver {
    /// Blocks until a batch closes. `None` once all senders are gone and
    /// nothing is pending.
    pub fn next_batch(&mut self) -> Option<Batch> {
        let first = self.rx.recv().ok()?;
        let deadline = self.policy.max_wait.map(|w| Instant::now() + w);
        let mut queries = vec![first];
        while queries.len() < self.policy.max_queries {
            let next = match deadline {
                None => self.rx.recv().map_err(|_| RecvTimeoutError::Disconnected),
                Some(d) => {
                    let left = d.saturating_duration_since(Instant::now());
                    if left.is_zero() {
                        Err(RecvTimeoutError::Timeout)
                    } else {
                        self.rx.recv_timeout(left)
                    }
                }
            };
            match next {
                Ok(q) => queries.push(q),
                Err(RecvTimeoutError::Timeout) => {
                    return Some(Batch {
                        queries,
                        reason: BatchReason::MaxWait,
                    })
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Some(Batch {
                        queries,
                        reason: BatchReason::Flush,
                    })
                }
            }
        }
        Some(Batch {
            queries,
            reason: BatchReason::MaxCount,
        })
    }
}

impl Iterator for BatchReceiver {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        self.next_batch()
    }
}
