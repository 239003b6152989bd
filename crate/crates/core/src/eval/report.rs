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

//! Aggregated results and their text renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::recommend::Method;
use crate::social::SourceSelection;

/// Means over every scored query of every fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub k: usize,
    pub method: Method,
    pub source: SourceSelection,
    pub ranks: Vec<usize>,
    pub p_at: Vec<f64>,
    pub s_at: Vec<f64>,
    pub mrr: f64,
    /// Mean size of the model that answered each query.
    pub n_tagsets: f64,
    /// Wall time of mining plus answering, summed over folds.
    pub time_ms: f64,
    /// Mean source size as a percentage of the user-centered database.
    pub frac_uk: f64,
    /// Mean source size as a percentage of the training database.
    pub frac_ck: f64,
    pub n_queries: usize,
    /// Test transactions with too few tags to form a query.
    pub skipped: usize,
    pub models_built: usize,
    pub batches: usize,
    pub fallbacks: usize,
}

impl MetricsReport {
    fn at(&self, values: &[f64], rank: usize) -> Option<f64> {
        self.ranks.iter().position(|&r| r == rank).map(|i| values[i])
    }

    pub fn p_at(&self, rank: usize) -> Option<f64> {
        self.at(&self.p_at, rank)
    }

    pub fn s_at(&self, rank: usize) -> Option<f64> {
        self.at(&self.s_at, rank)
    }

    pub fn time_per_query_ms(&self) -> f64 {
        self.time_ms / self.n_queries.max(1) as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Tsv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown format `{s}` (expected tsv or markdown)")),
        }
    }
}

const TAIL: [&str; 5] = ["n_queries", "skipped", "models_built", "batches", "fallbacks"];

fn tsv_header(ranks: &[usize]) -> Vec<String> {
    let mut cols: Vec<String> = ["k", "method", "source", "n_tagsets"].map(String::from).to_vec();
    cols.extend(ranks.iter().map(|r| format!("p{r}")));
    // S@1 always equals P@1
    cols.extend(ranks.iter().filter(|&&r| r != 1).map(|r| format!("s{r}")));
    cols.extend(["mrr", "time_ms", "frac_uk", "frac_ck"].map(String::from));
    cols.extend(TAIL.map(String::from));
    cols
}

fn tsv_row(r: &MetricsReport) -> Vec<String> {
    let mut row = vec![
        r.k.to_string(),
        r.method.to_string(),
        r.source.to_string(),
        r.n_tagsets.to_string(),
    ];
    row.extend(r.p_at.iter().map(f64::to_string));
    row.extend(
        r.ranks
            .iter()
            .zip(&r.s_at)
            .filter(|(&rank, _)| rank != 1)
            .map(|(_, v)| v.to_string()),
    );
    row.extend([r.mrr, r.time_ms, r.frac_uk, r.frac_ck].map(|v| v.to_string()));
    row.extend(
        [r.n_queries, r.skipped, r.models_built, r.batches, r.fallbacks].map(|v| v.to_string()),
    );
    row
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

/// Renders reports that share one rank list. TSV is lossless (see
/// [`parse_tsv`]); markdown shows metrics as percentages.
pub fn emit_report(reports: &[MetricsReport], format: ReportFormat) -> String {
    let ranks = reports.first().map_or(super::DEFAULT_RANKS.to_vec(), |r| r.ranks.clone());
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str(&tsv_header(&ranks).join("\t"));
            out.push('\n');
            for r in reports {
                out.push_str(&tsv_row(r).join("\t"));
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            let mut head = vec!["k".to_string(), "method".into(), "source".into(), "#tagsets".into()];
            head.extend(ranks.iter().map(|r| format!("P@{r}")));
            head.extend(ranks.iter().filter(|&&r| r != 1).map(|r| format!("S@{r}")));
            head.extend(["MRR", "time (ms)", "|D|/|UK| %", "|D|/|CK| %"].map(String::from));
            let _ = writeln!(out, "| {} |", head.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(head.len()));
            for r in reports {
                let mut row = vec![
                    r.k.to_string(),
                    r.method.to_string(),
                    r.source.label(),
                    format!("{:.0}", r.n_tagsets),
                ];
                row.extend(r.p_at.iter().map(|v| pct(*v)));
                row.extend(
                    r.ranks
                        .iter()
                        .zip(&r.s_at)
                        .filter(|(&rank, _)| rank != 1)
                        .map(|(_, v)| pct(*v)),
                );
                row.push(pct(r.mrr));
                row.push(format!("{:.0}", r.time_ms));
                row.push(format!("{:.1}", r.frac_uk));
                row.push(format!("{:.1}", r.frac_ck));
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
    }
    out
}

/// Parses the output of [`emit_report`] in TSV format.
pub fn parse_tsv(text: &str) -> Result<Vec<MetricsReport>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or("missing header")?.split('\t').collect();
    let ranks: Vec<usize> = header
        .iter()
        .filter_map(|c| c.strip_prefix('p')?.parse().ok())
        .collect();
    if header != tsv_header(&ranks) {
        return Err("unexpected columns".into());
    }
    let n_ranks = ranks.len();
    let s_cols = ranks.iter().filter(|&&r| r != 1).count();
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != header.len() {
                return Err(format!("row {}: expected {} fields", i + 1, header.len()));
            }
            let bad = |c: usize| format!("row {}: bad `{}`", i + 1, header[c]);
            let float = |c: usize| f[c].parse::<f64>().map_err(|_| bad(c));
            let int = |c: usize| f[c].parse::<usize>().map_err(|_| bad(c));
            let p_at = (4..4 + n_ranks).map(float).collect::<Result<Vec<_>, _>>()?;
            let mut s_iter = (4 + n_ranks..4 + n_ranks + s_cols).map(float);
            let s_at = ranks
                .iter()
                .enumerate()
                .map(|(j, &r)| if r == 1 { Ok(p_at[j]) } else { s_iter.next().expect("counted") })
                .collect::<Result<Vec<_>, _>>()?;
            let c = 4 + n_ranks + s_cols;
            Ok(MetricsReport {
                k: int(0)?,
                method: f[1].parse()?,
                source: f[2].parse()?,
                ranks: ranks.clone(),
                n_tagsets: float(3)?,
                p_at,
                s_at,
                mrr: float(c)?,
                time_ms: float(c + 1)?,
                frac_uk: float(c + 2)?,
                frac_ck: float(c + 3)?,
                n_queries: int(c + 4)?,
                skipped: int(c + 5)?,
                models_built: int(c + 6)?,
                batches: int(c + 7)?,
                fallbacks: int(c + 8)?,
            })
        })
        .collect()
}
