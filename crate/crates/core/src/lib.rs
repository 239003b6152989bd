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

//! Tag recommendation from association patterns mined over social sources.
//!
//! Given a few input tags for a resource, the recommenders rank further
//! tags by summed conditional probabilities drawn from one of three
//! models: pairwise co-occurrence (PAR), exact supports of closed frequent
//! tagsets (NAR), or supports estimated from an MDL-induced code table
//! (FAR). The [`social`] module decides which transactions the model is
//! mined from: all of them, the querying user's friendship neighbourhood,
//! their own history, a batch of users' histories, or their groups.
//!
//! Scores are generic over [`scalar::Score`]; the aliases below fix the two
//! instantiations used in practice.

pub mod codetable;
pub mod corpus;
pub mod eval;
pub mod miner;
pub mod recommend;
pub mod scalar;
pub mod social;
pub mod synth;

use num_rational::Ratio;

pub use corpus::{Corpus, Query, TagDatabase, TagId, Tagset};
pub use recommend::{AssociationModel, Method, RecommenderConfig};

/// Exact score arithmetic, for oracles and ties that must not round.
pub type ExactScore = Ratio<i64>;

pub type Recommendation = recommend::Recommendation<f64>;
pub type ExactRecommendation = recommend::Recommendation<ExactScore>;
pub type Answer = social::Answer<f64>;
pub type QueryScore = eval::QueryScore<f64>;
pub type CodeLengths = codetable::EncodedSize<f64>;
