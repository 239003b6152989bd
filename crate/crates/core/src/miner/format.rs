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

//! Line-oriented text format for mined artifacts: `tag,tag:count` per line,
//! `#` comment lines, `key=value` pairs in the header comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Closedness, CooccurrenceIndex, FrequentTagsetCollection, MinSupport, MiningParams};
use crate::corpus::{TagId, TagVocabulary, Tagset};

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: tag `{tag}` is not in the vocabulary")]
    UnknownTag { line: usize, tag: String },
    #[error("missing header field `{0}`")]
    MissingHeader(&'static str),
}

pub(crate) fn format_tagset(vocabulary: &TagVocabulary, set: &Tagset) -> String {
    let labels: Vec<&str> = set.iter().map(|t| vocabulary.label(t)).collect();
    labels.join(",")
}

/// Splits `tag,tag:count` into tag ids (file order) and the count.
pub(crate) fn parse_entry(
    vocabulary: &TagVocabulary,
    line: usize,
    text: &str,
) -> Result<(Vec<TagId>, usize), FormatError> {
    let malformed = |reason: &str| FormatError::Malformed {
        line,
        reason: reason.to_owned(),
    };
    let (tags, count) = text
        .rsplit_once(':')
        .ok_or_else(|| malformed("expected `tags:count`"))?;
    let count = count
        .trim()
        .parse()
        .map_err(|_| malformed("count is not a non-negative integer"))?;
    let ids = tags
        .split(',')
        .map(|label| {
            vocabulary.get(label).ok_or_else(|| FormatError::UnknownTag {
                line,
                tag: label.to_owned(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ids, count))
}

/// `(line number, content)` for data lines, plus header `key=value` pairs.
pub(crate) fn split_lines(text: &str) -> (HashMap<String, String>, Vec<(usize, &str)>) {
    let mut header = HashMap::new();
    let mut data = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                if let Some((k, v)) = token.split_once('=') {
                    header.insert(k.to_owned(), v.to_owned());
                }
            }
        } else if !line.trim().is_empty() {
            data.push((i + 1, line));
        }
    }
    (header, data)
}

pub(crate) fn header_field<T: std::str::FromStr>(
    header: &HashMap<String, String>,
    key: &'static str,
) -> Result<T, FormatError> {
    header
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or(FormatError::MissingHeader(key))
}

pub fn write_frequent(vocabulary: &TagVocabulary, f: &FrequentTagsetCollection) -> String {
    let p = f.params();
    let mut out = format!(
        "# closed-tagsets min_support={} max_len={} top_m={} closedness={} min_support_abs={}\n",
        p.min_support,
        p.max_len,
        p.top_m,
        p.closedness,
        f.min_support()
    );
    for (set, support) in f.iter() {
        let _ = writeln!(out, "{}:{}", format_tagset(vocabulary, set), support);
    }
    out
}

pub fn read_frequent(
    vocabulary: &TagVocabulary,
    text: &str,
) -> Result<FrequentTagsetCollection, FormatError> {
    let (header, lines) = split_lines(text);
    let min_support: MinSupport = header_field(&header, "min_support")?;
    let params = MiningParams {
        min_support,
        max_len: header_field(&header, "max_len")?,
        top_m: header_field(&header, "top_m")?,
        closedness: header_field::<Closedness>(&header, "closedness")?,
    };
    let min_abs = header_field(&header, "min_support_abs")?;
    let entries = lines
        .into_iter()
        .map(|(line, text)| {
            parse_entry(vocabulary, line, text).map(|(ids, c)| (Tagset::from(ids), c))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrequentTagsetCollection::from_entries(
        entries, params, min_abs,
    ))
}

pub fn write_cooccurrence(vocabulary: &TagVocabulary, index: &CooccurrenceIndex) -> String {
    let mut out = format!(
        "# cooccurrence top_m={} transactions={}\n",
        index.top_m(),
        index.n_transactions()
    );
    for t in 0..index.n_tags() as TagId {
        let support = index.tag_support(t);
        if support == 0 {
            continue;
        }
        let label = vocabulary.label(t);
        let _ = writeln!(out, "{label}:{support}");
        for &(c, joint) in index.top_list(t) {
            let _ = writeln!(out, "{label},{}:{joint}", vocabulary.label(c));
        }
    }
    out
}

pub fn read_cooccurrence(
    vocabulary: &TagVocabulary,
    text: &str,
) -> Result<CooccurrenceIndex, FormatError> {
    let (header, lines) = split_lines(text);
    let top_m = header_field(&header, "top_m")?;
    let n_transactions = header_field(&header, "transactions")?;
    let mut support = vec![0; vocabulary.len()];
    let mut lists = vec![Vec::new(); vocabulary.len()];
    for (line, text) in lines {
        let (ids, count) = parse_entry(vocabulary, line, text)?;
        match ids.as_slice() {
            [t] => support[*t as usize] = count,
            [t, c] => lists[*t as usize].push((*c, count)),
            _ => {
                return Err(FormatError::Malformed {
                    line,
                    reason: "expected one or two tags".into(),
                })
            }
        }
    }
    Ok(CooccurrenceIndex::from_parts(
        top_m,
        n_transactions,
        support,
        lists,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{build_cooccurrence, mine_closed};
    use super::*;
    use crate::corpus::TagDatabase;

    fn db() -> TagDatabase {
        TagDatabase::from_tagsets([vec![0, 1, 2], vec![0, 1], vec![1, 2], vec![0, 1, 3]])
    }

    #[test]
    fn frequent_round_trip() {
        let db = db();
        let f = mine_closed(&db, &MiningParams::new(MinSupport::Absolute(1), 3)).unwrap();
        let text = write_frequent(db.vocabulary(), &f);
        assert!(text.contains("t0,t1:3\n"));
        let back = read_frequent(db.vocabulary(), &text).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_frequent(db.vocabulary(), &back), text);
    }

    #[test]
    fn cooccurrence_round_trip() {
        let db = db();
        let idx = build_cooccurrence(&db, 2).unwrap();
        let text = write_cooccurrence(db.vocabulary(), &idx);
        assert_eq!(read_cooccurrence(db.vocabulary(), &text).unwrap(), idx);
    }

    #[test]
    fn unknown_tag_is_reported() {
        let db = db();
        let err = read_cooccurrence(db.vocabulary(), "# top_m=1 transactions=1\nzz:1\n");
        assert_eq!(
            err,
            Err(FormatError::UnknownTag {
                line: 2,
                tag: "zz".into()
            })
        );
    }
}
