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

//! Support counting, top-m co-occurrence and closed frequent tagset mining.

mod bitset;
mod closed;
mod cooccurrence;
pub mod format;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{TagDatabase, Tagset};

pub use bitset::{TidSet, VerticalIndex};
pub use closed::{mine_closed, FrequentTagsetCollection};
pub use cooccurrence::{build_cooccurrence, CooccurrenceIndex};

/// Default number of co-occurring tags kept per tag.
pub const DEFAULT_TOP_M: usize = 50;
/// Relative minimum support used for exact (NAR) mining.
pub const NAR_MIN_SUPPORT: f64 = 0.0007;
/// Relative minimum support for code-table candidates on the contact corpora.
pub const FAR_MIN_SUPPORT: f64 = 0.00007;
/// Relative minimum support for code-table candidates on the group corpus.
pub const FAR_GROUP_MIN_SUPPORT: f64 = 0.0003;
pub const DEFAULT_MAX_LEN: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum MinerError {
    #[error("invalid mining parameters: {0}")]
    InvalidParams(String),
}

/// Minimum support, either a fraction of the database or a transaction count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MinSupport {
    Relative(f64),
    Absolute(usize),
}

impl MinSupport {
    /// Absolute threshold for a database of `n` transactions: `ceil(f·n)`, at least 1.
    pub fn to_absolute(self, n: usize) -> usize {
        match self {
            MinSupport::Absolute(c) => c.max(1),
            MinSupport::Relative(f) => {
                // shave float noise so that e.g. 0.5 × 10 stays 5
                let raw = (f * n as f64 - 1e-9).ceil();
                (raw.max(1.0)) as usize
            }
        }
    }

    pub fn validate(self) -> Result<(), MinerError> {
        match self {
            MinSupport::Relative(f) if !(f > 0.0 && f <= 1.0) => Err(MinerError::InvalidParams(
                format!("relative minimum support must lie in (0, 1], got {f}"),
            )),
            MinSupport::Absolute(0) => Err(MinerError::InvalidParams(
                "absolute minimum support must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl FromStr for MinSupport {
    type Err = MinerError;

    /// Integers (`"3"`) are absolute counts; anything with a decimal point or
    /// exponent is a fraction.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || MinerError::InvalidParams(format!("cannot parse minimum support `{s}`"));
        let parsed = if s.bytes().all(|b| b.is_ascii_digit()) {
            MinSupport::Absolute(s.parse().map_err(|_| bad())?)
        } else {
            MinSupport::Relative(s.parse().map_err(|_| bad())?)
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

impl fmt::Display for MinSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinSupport::Relative(x) => write!(f, "{x:?}"),
            MinSupport::Absolute(c) => write!(f, "{c}"),
        }
    }
}

/// How closedness is judged when mining.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closedness {
    /// No strict superset of size `<= max_len` has the same support.
    #[default]
    LengthBounded,
    /// No strict superset of any size has the same support.
    Global,
}

impl FromStr for Closedness {
    type Err = MinerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bounded" | "length-bounded" => Ok(Closedness::LengthBounded),
            "global" => Ok(Closedness::Global),
            _ => Err(MinerError::InvalidParams(format!(
                "unknown closedness `{s}` (expected bounded or global)"
            ))),
        }
    }
}

impl fmt::Display for Closedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Closedness::LengthBounded => "bounded",
            Closedness::Global => "global",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningParams {
    pub min_support: MinSupport,
    pub max_len: usize,
    pub top_m: usize,
    pub closedness: Closedness,
}

impl MiningParams {
    pub fn new(min_support: MinSupport, max_len: usize) -> Self {
        MiningParams {
            min_support,
            max_len,
            top_m: DEFAULT_TOP_M,
            closedness: Closedness::LengthBounded,
        }
    }

    /// Exact-association settings: minsup 0.0007, maxlen 3, m = 50.
    pub fn nar_default() -> Self {
        Self::new(MinSupport::Relative(NAR_MIN_SUPPORT), DEFAULT_MAX_LEN)
    }

    /// Code-table candidate settings: minsup 0.00007, maxlen 3.
    pub fn far_default() -> Self {
        Self::new(MinSupport::Relative(FAR_MIN_SUPPORT), DEFAULT_MAX_LEN)
    }

    pub fn validate(&self) -> Result<(), MinerError> {
        self.min_support.validate()?;
        if self.max_len == 0 {
            return Err(MinerError::InvalidParams("max_len must be at least 1".into()));
        }
        if self.top_m == 0 {
            return Err(MinerError::InvalidParams("top_m must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for MiningParams {
    fn default() -> Self {
        Self::nar_default()
    }
}

/// Number of transactions of `db` containing `x`.
pub fn support(db: &TagDatabase, x: &Tagset) -> usize {
    db.support(x)
}
