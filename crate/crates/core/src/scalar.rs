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

//! Numeric types used for scores and metrics.
//!
//! Recommendation scores are sums of support ratios, so any type that can
//! represent `a / b` for counts works: `f32`, `f64`, or an exact rational.

use std::fmt::Debug;
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// A field-like number that can hold ratios of counts.
pub trait Score:
    Num + Copy + PartialOrd + Debug + Sum + ToPrimitive + Send + Sync + 'static
{
    /// `numerator / denominator`; callers guarantee `denominator > 0`.
    fn ratio(numerator: usize, denominator: usize) -> Self;

    fn from_count(n: usize) -> Self {
        Self::ratio(n, 1)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Score for f64 {
    fn ratio(numerator: usize, denominator: usize) -> Self {
        numerator as f64 / denominator as f64
    }
}

impl Score for f32 {
    fn ratio(numerator: usize, denominator: usize) -> Self {
        numerator as f32 / denominator as f32
    }
}

impl Score for Ratio<i64> {
    fn ratio(numerator: usize, denominator: usize) -> Self {
        Ratio::new(numerator as i64, denominator as i64)
    }
}

impl Score for Ratio<i128> {
    fn ratio(numerator: usize, denominator: usize) -> Self {
        Ratio::new(numerator as i128, denominator as i128)
    }
}
