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

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::warn;
use thiserror::Error;

use super::{
    Corpus, GroupIndex, Interner, Query, SocialGraph, TagDatabase, Tagset, Transaction, TxnId,
};

const ABSENT: &str = "-";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {reason}")]
    Malformed {
        file: &'static str,
        line: usize,
        reason: String,
    },
    #[error("{file} line {line}: unknown user `{user}`")]
    UnknownUser {
        file: &'static str,
        line: usize,
        user: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Transactions with fewer distinct tags are dropped. Zero disables the rule.
    pub min_tags: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { min_tags: 2 }
    }
}

/// Counters for everything ingestion repaired or discarded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub dropped_short: usize,
    pub duplicate_tags: usize,
    pub asymmetric_edges: usize,
    pub self_loops: usize,
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads and validates a corpus from the transactions, graph and groups files.
pub fn load_corpus(
    transactions_path: &Path,
    graph_path: Option<&Path>,
    groups_path: Option<&Path>,
    options: LoadOptions,
) -> Result<(Corpus, LoadReport), CorpusError> {
    let transactions = read(transactions_path)?;
    let graph = graph_path.map(read).transpose()?;
    let groups = groups_path.map(read).transpose()?;
    parse_corpus(&transactions, graph.as_deref(), groups.as_deref(), options)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn optional(field: &str) -> Option<&str> {
    (field != ABSENT).then_some(field)
}

fn split_tags<'a>(
    file: &'static str,
    line: usize,
    field: &'a str,
) -> Result<Vec<&'a str>, CorpusError> {
    let tags: Vec<&str> = field.split(',').collect();
    if tags.iter().any(|t| t.is_empty()) {
        return Err(CorpusError::Malformed {
            file,
            line,
            reason: "empty tag label".into(),
        });
    }
    Ok(tags)
}

/// Parses corpus text in the three line formats.
///
/// Transactions: `user<TAB>group|-<TAB>interest|-<TAB>tag,tag,...`.
/// Graph: `user user`. Groups: `group<TAB>user`. `#` starts a comment line.
pub fn parse_corpus(
    transactions: &str,
    graph: Option<&str>,
    groups: Option<&str>,
    options: LoadOptions,
) -> Result<(Corpus, LoadReport), CorpusError> {
    const TX: &str = "transactions";
    let mut report = LoadReport::default();
    let mut vocabulary = Interner::new();
    let mut users = Interner::new();
    let mut group_labels = Interner::new();
    let mut interests = Interner::new();
    let mut group_index = GroupIndex::new();
    let mut rows = Vec::new();

    for (line, text) in content_lines(transactions) {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::Malformed {
                file: TX,
                line,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[0] == ABSENT {
            return Err(CorpusError::Malformed {
                file: TX,
                line,
                reason: "missing user id".into(),
            });
        }
        let raw = split_tags(TX, line, fields[3])?;
        let mut seen = HashSet::with_capacity(raw.len());
        let distinct: Vec<&str> = raw.iter().copied().filter(|t| seen.insert(*t)).collect();
        report.duplicate_tags += raw.len() - distinct.len();
        if distinct.len() < options.min_tags {
            report.dropped_short += 1;
            continue;
        }
        let user = users.intern(fields[0]);
        let group = optional(fields[1]).map(|g| group_labels.intern(g));
        let interest = optional(fields[2]).map(|i| interests.intern(i));
        let tags: Tagset = distinct.iter().map(|t| vocabulary.intern(t)).collect();
        let id = rows.len() as TxnId;
        if let Some(g) = group {
            group_index.add_transaction(g, id);
            group_index.add_member(g, user);
        }
        rows.push(Transaction {
            id,
            user,
            group,
            interest,
            tags,
        });
    }
    if report.duplicate_tags > 0 {
        warn!(
            "removed {} duplicate tags within transactions",
            report.duplicate_tags
        );
    }

    let mut social = SocialGraph::with_users(users.len());
    if let Some(text) = graph {
        const GR: &str = "graph";
        let mut directed = HashSet::new();
        for (line, text) in content_lines(text) {
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(CorpusError::Malformed {
                    file: GR,
                    line,
                    reason: format!("expected 2 user ids, found {}", fields.len()),
                });
            }
            let lookup = |u: &str| {
                users.get(u).ok_or_else(|| CorpusError::UnknownUser {
                    file: GR,
                    line,
                    user: u.to_owned(),
                })
            };
            let (u, v) = (lookup(fields[0])?, lookup(fields[1])?);
            if u == v {
                report.self_loops += 1;
                continue;
            }
            directed.insert((u, v));
            social.add_edge(u, v);
        }
        report.asymmetric_edges = directed
            .iter()
            .filter(|&&(u, v)| !directed.contains(&(v, u)))
            .count();
        // one line per undirected edge is the normal convention; only a file
        // that lists some edges in both directions but not others is suspect
        let mutual = directed.len() - report.asymmetric_edges;
        if report.asymmetric_edges > 0 && mutual > 0 {
            warn!(
                "graph lists {} edges without their reverse; symmetrized",
                report.asymmetric_edges
            );
        }
        if report.self_loops > 0 {
            warn!("dropped {} self-loops from graph", report.self_loops);
        }
    }

    if let Some(text) = groups {
        const GP: &str = "groups";
        for (line, text) in content_lines(text) {
            let fields: Vec<&str> = text.split('\t').collect();
            if fields.len() != 2 || fields[0].is_empty() {
                return Err(CorpusError::Malformed {
                    file: GP,
                    line,
                    reason: "expected `group<TAB>user`".into(),
                });
            }
            let user = users.get(fields[1]).ok_or_else(|| CorpusError::UnknownUser {
                file: GP,
                line,
                user: fields[1].to_owned(),
            })?;
            let group = group_labels.intern(fields[0]);
            group_index.add_member(group, user);
        }
    }

    let corpus = Corpus {
        db: TagDatabase::new(Arc::new(vocabulary), rows),
        graph: social,
        groups: group_index,
        users,
        group_labels,
        interests,
    };
    Ok((corpus, report))
}

fn label_or_absent(labels: &Interner, id: Option<u32>) -> &str {
    id.map_or(ABSENT, |i| labels.label(i))
}

fn join_tags(vocabulary: &Interner, tags: &Tagset) -> String {
    let mut labels: Vec<&str> = tags.iter().map(|t| vocabulary.label(t)).collect();
    labels.sort_unstable();
    labels.join(",")
}

/// Canonical transactions file: input order, tag labels sorted.
pub fn write_transactions(corpus: &Corpus) -> String {
    let mut out = String::new();
    for t in corpus.db.iter() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            corpus.users.label(t.user),
            label_or_absent(&corpus.group_labels, t.group),
            label_or_absent(&corpus.interests, t.interest),
            join_tags(corpus.db.vocabulary(), &t.tags)
        );
    }
    out
}

/// Canonical graph file: each undirected edge once, lower user id first.
pub fn write_graph(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (u, v) in corpus.graph.edges() {
        let _ = writeln!(out, "{} {}", corpus.users.label(u), corpus.users.label(v));
    }
    out
}

/// Canonical groups file: grouped by group label, members in user id order.
pub fn write_groups(corpus: &Corpus) -> String {
    let mut out = String::new();
    let mut rows: Vec<_> = corpus.groups.memberships().collect();
    rows.sort_by(|a, b| corpus.group_labels.label(a.0).cmp(corpus.group_labels.label(b.0)).then(a.1.cmp(&b.1)));
    for (g, u) in rows {
        let _ = writeln!(
            out,
            "{}\t{}",
            corpus.group_labels.label(g),
            corpus.users.label(u)
        );
    }
    out
}

/// Parses a query stream: `user<TAB>interest|-<TAB>tag,tag,...`.
///
/// Users and interests the corpus has never seen are interned as new ids
/// (such users simply have no history). Tags outside the vocabulary are
/// dropped with a warning; a line left without any known tag is an error.
pub fn parse_queries(text: &str, corpus: &mut Corpus) -> Result<Vec<Query>, CorpusError> {
    const QF: &str = "queries";
    let mut out = Vec::new();
    for (line, text) in content_lines(text) {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 || fields[0].is_empty() {
            return Err(CorpusError::Malformed {
                file: QF,
                line,
                reason: "expected `user<TAB>interest<TAB>tags`".into(),
            });
        }
        let labels = split_tags(QF, line, fields[2])?;
        let mut input = Vec::with_capacity(labels.len());
        for label in labels {
            match corpus.db.vocabulary().get(label) {
                Some(id) => input.push(id),
                None => warn!("queries line {line}: unknown tag `{label}` ignored"),
            }
        }
        if input.is_empty() {
            return Err(CorpusError::Malformed {
                file: QF,
                line,
                reason: "no known input tag".into(),
            });
        }
        out.push(Query {
            user: corpus.users.intern(fields[0]),
            input: input.into(),
            interest: optional(fields[1]).map(|i| corpus.interests.intern(i)),
        });
    }
    Ok(out)
}

pub fn write_queries(corpus: &Corpus, queries: &[Query]) -> String {
    let mut out = String::new();
    for q in queries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            corpus.users.label(q.user),
            label_or_absent(&corpus.interests, q.interest),
            join_tags(corpus.db.vocabulary(), &q.input)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixture() {
        let text = "u1\t-\t-\ta,b,c\nu2\tg1\tparis\ta,b\n";
        let (c, report) = parse_corpus(text, None, None, LoadOptions::default()).unwrap();
        assert_eq!(c.db.len(), 2);
        assert_eq!(c.vocabulary().len(), 3);
        let g1 = c.group_labels.get("g1").unwrap();
        assert_eq!(c.groups.transactions_of(g1).len(), 1);
        assert_eq!(c.db.transactions()[1].interest, c.interests.get("paris"));
        assert_eq!(report, LoadReport::default());
    }

    #[test]
    fn short_transactions_are_dropped_and_counted() {
        let text = "u1\t-\t-\ta,b\nu1\t-\t-\tsolo\n";
        let (c, report) = parse_corpus(text, None, None, LoadOptions { min_tags: 2 }).unwrap();
        assert_eq!(c.db.len(), 1);
        assert_eq!(report.dropped_short, 1);
        assert!(c.vocabulary().get("solo").is_none());

        let (c, _) = parse_corpus(text, None, None, LoadOptions { min_tags: 0 }).unwrap();
        assert_eq!(c.db.len(), 2);
    }

    #[test]
    fn duplicate_tags_are_deduplicated() {
        let text = "u1\t-\t-\ta,b,a\n";
        let (c, report) = parse_corpus(text, None, None, LoadOptions::default()).unwrap();
        assert_eq!(c.db.transactions()[0].tags.len(), 2);
        assert_eq!(report.duplicate_tags, 1);
    }

    #[test]
    fn graph_is_symmetrized() {
        let text = "u1\t-\t-\ta,b\nu2\t-\t-\ta,b\n";
        let (c, report) =
            parse_corpus(text, Some("u1 u2\n"), None, LoadOptions::default()).unwrap();
        let (u1, u2) = (c.users.get("u1").unwrap(), c.users.get("u2").unwrap());
        assert_eq!(c.graph.neighbors(u1).collect::<Vec<_>>(), vec![u2]);
        assert_eq!(c.graph.neighbors(u2).collect::<Vec<_>>(), vec![u1]);
        assert_eq!(report.asymmetric_edges, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "# header\nu1\t-\t-\ta,b\nu2\ta,b\n";
        match parse_corpus(text, None, None, LoadOptions::default()) {
            Err(CorpusError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_users_are_rejected() {
        let text = "u1\t-\t-\ta,b\n";
        let err = parse_corpus(text, Some("u1 ghost\n"), None, LoadOptions::default());
        assert!(matches!(err, Err(CorpusError::UnknownUser { line: 1, .. })));
        let err = parse_corpus(text, None, Some("g\tghost\n"), LoadOptions::default());
        assert!(matches!(err, Err(CorpusError::UnknownUser { .. })));
    }

    #[test]
    fn queries_intern_new_users() {
        let text = "u1\t-\tlondon\ta,b\n";
        let (mut c, _) = parse_corpus(text, None, None, LoadOptions::default()).unwrap();
        let qs = parse_queries("new\t-\ta,zzz\nu1\tlondon\tb\n", &mut c).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].input.len(), 1);
        assert_eq!(c.users.len(), 2);
        assert_eq!(qs[1].interest, c.interests.get("london"));
        assert!(parse_queries("u1\t-\tzzz\n", &mut c).is_err());
    }
}
