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

//! Code tables: MDL-selected tagsets with usage counts, used to estimate
//! supports that the pairwise index cannot answer.

mod induce;

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::{TagId, TagVocabulary, Tagset};
use crate::miner::format::{header_field, parse_entry, split_lines, FormatError};

pub use induce::{encoded_size, induce, induce_traced, EncodedSize, Induction};

#[derive(Debug, Error, PartialEq)]
pub enum CodeTableError {
    #[error("tag {0} has no singleton in the code table (vocabulary mismatch)")]
    Uncoverable(TagId),
    #[error("cannot induce a code table from an empty database")]
    EmptyDatabase,
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeTableElement {
    pub tagset: Tagset,
    pub usage: usize,
}

/// Tagsets in Standard Cover Order (length desc, support desc, lexicographic)
/// with the number of transactions whose cover uses each one.
#[derive(Clone, Debug)]
pub struct CodeTable {
    elements: Vec<CodeTableElement>,
    total_usage: usize,
    source_db_size: usize,
    /// Elements with non-zero usage, per tag.
    used_by_tag: HashMap<TagId, Vec<u32>>,
}

impl PartialEq for CodeTable {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
            && self.total_usage == other.total_usage
            && self.source_db_size == other.source_db_size
    }
}

impl CodeTable {
    /// Elements must already be in cover order.
    pub fn from_elements(elements: Vec<CodeTableElement>, source_db_size: usize) -> Self {
        let total_usage = elements.iter().map(|e| e.usage).sum();
        let mut used_by_tag: HashMap<TagId, Vec<u32>> = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if e.usage > 0 {
                for t in e.tagset.iter() {
                    used_by_tag.entry(t).or_default().push(i as u32);
                }
            }
        }
        CodeTable {
            elements,
            total_usage,
            source_db_size,
            used_by_tag,
        }
    }

    pub fn elements(&self) -> &[CodeTableElement] {
        &self.elements
    }

    /// Number of elements, singletons included.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements with non-zero usage: the ones that carry a code.
    pub fn n_used(&self) -> usize {
        self.elements.iter().filter(|e| e.usage > 0).count()
    }

    /// Elements with more than one tag.
    pub fn n_patterns(&self) -> usize {
        self.elements.iter().filter(|e| e.tagset.len() > 1).count()
    }

    pub fn total_usage(&self) -> usize {
        self.total_usage
    }

    pub fn source_db_size(&self) -> usize {
        self.source_db_size
    }

    pub fn usage(&self, tagset: &Tagset) -> Option<usize> {
        self.elements
            .iter()
            .find(|e| &e.tagset == tagset)
            .map(|e| e.usage)
    }

    /// Greedy cover: walk the elements in order and take every element
    /// contained in what is still uncovered.
    pub fn cover(&self, t: &Tagset) -> Result<Vec<Tagset>, CodeTableError> {
        let mut rest = t.clone();
        let mut out = Vec::new();
        for e in &self.elements {
            if rest.is_empty() {
                break;
            }
            if e.tagset.is_subset(&rest) {
                rest = rest.difference(&e.tagset);
                out.push(e.tagset.clone());
            }
        }
        match rest.as_slice().first() {
            Some(&tag) => Err(CodeTableError::Uncoverable(tag)),
            None => Ok(out),
        }
    }

    /// Estimated support of `x`: the summed usage of every element that
    /// contains `x`. Never exceeds the true support in the source database,
    /// since cover elements of one transaction are disjoint and so at most
    /// one of them can contain `x`.
    pub fn estimate_support(&self, x: &Tagset) -> usize {
        if x.is_empty() {
            return self.source_db_size;
        }
        let postings = x
            .iter()
            .map(|t| self.used_by_tag.get(&t).map_or(&[][..], Vec::as_slice))
            .min_by_key(|p| p.len())
            .unwrap_or(&[]);
        postings
            .iter()
            .map(|&i| &self.elements[i as usize])
            .filter(|e| x.is_subset(&e.tagset))
            .map(|e| e.usage)
            .sum()
    }

    pub fn write(&self, vocabulary: &TagVocabulary) -> String {
        let mut out = format!(
            "# code-table total_usage={} source_db_size={}\n",
            self.total_usage, self.source_db_size
        );
        for e in &self.elements {
            let labels: Vec<&str> = e.tagset.iter().map(|t| vocabulary.label(t)).collect();
            let _ = writeln!(out, "{}:{}", labels.join(","), e.usage);
        }
        out
    }

    pub fn read(vocabulary: &TagVocabulary, text: &str) -> Result<Self, CodeTableError> {
        let (header, lines) = split_lines(text);
        let source_db_size = header_field(&header, "source_db_size")?;
        let declared: usize = header_field(&header, "total_usage")?;
        let elements = lines
            .into_iter()
            .map(|(line, text)| {
                parse_entry(vocabulary, line, text).map(|(ids, usage)| CodeTableElement {
                    tagset: ids.into(),
                    usage,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let table = CodeTable::from_elements(elements, source_db_size);
        if table.total_usage != declared {
            return Err(FormatError::Malformed {
                line: 1,
                reason: format!(
                    "header total_usage={declared} but usages sum to {}",
                    table.total_usage
                ),
            }
            .into());
        }
        Ok(table)
    }
}
