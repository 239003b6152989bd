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

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context as _};
use log::warn;
use socialtag::codetable::induce_traced;
use socialtag::corpus::{load_corpus, parse_queries, profile, write_graph, write_groups, write_transactions, Corpus, LoadOptions, Query};
use socialtag::eval::{emit_report, run_experiment, EvalConfig};
use socialtag::miner::format::{write_cooccurrence, write_frequent};
use socialtag::miner::{build_cooccurrence, mine_closed, MiningParams};
use socialtag::recommend::RecommenderConfig;
use socialtag::social::{answer_queries, BatchPolicy, Fallback, PipelineOptions, SourceKind, SourceSelection};
use socialtag::synth::{generate, SynthConfig};
use socialtag::{Answer, Recommendation};

use crate::cache::ModelCache;
use crate::manifest::{InputFile, RunManifest};
use crate::{emit, CorpusArgs, EvalArgs, Format, InduceArgs, MineArgs, ModelArgs, RecommendArgs, ReplayArgs, SynthArgs};

pub struct Context {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Context {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        emit(self.out.as_deref(), text)
    }
}

fn load(
    transactions: &Path,
    graph: Option<&Path>,
    groups: Option<&Path>,
    min_tags: usize,
) -> anyhow::Result<Corpus> {
    let (corpus, report) = load_corpus(transactions, graph, groups, LoadOptions { min_tags })?;
    if report.dropped_short > 0 {
        warn!("dropped {} transactions with fewer than {min_tags} tags", report.dropped_short);
    }
    if report.duplicate_tags > 0 {
        warn!("removed {} repeated tags within transactions", report.duplicate_tags);
    }
    if report.asymmetric_edges + report.self_loops > 0 {
        warn!(
            "graph: {} one-way edges symmetrised, {} self-loops ignored",
            report.asymmetric_edges, report.self_loops
        );
    }
    Ok(corpus)
}

fn load_args(a: &CorpusArgs) -> anyhow::Result<Corpus> {
    load(&a.transactions, a.graph.as_deref(), a.groups.as_deref(), a.min_tags)
}

/// Sources that select by friendship or group need the matching file.
fn require_inputs(kind: SourceKind, graph: Option<&Path>, groups: Option<&Path>) -> anyhow::Result<()> {
    if kind.needs_graph() && graph.is_none() {
        bail!("source `{kind}` needs the friendship graph file: pass --graph FILE");
    }
    if kind.needs_groups() && groups.is_none() {
        bail!("source `{kind}` needs the group membership file: pass --groups FILE");
    }
    Ok(())
}

fn recommender(m: &ModelArgs) -> anyhow::Result<RecommenderConfig> {
    let mut cfg = RecommenderConfig::new(m.method.into());
    cfg.mining = MiningParams::new(m.nar_minsup, m.maxlen);
    cfg.mining.top_m = m.top_m;
    cfg.ct_mining = MiningParams::new(m.far_minsup, m.maxlen);
    cfg.ct_mining.top_m = m.top_m;
    cfg.max_recommendations = m.limit;
    cfg.mining.validate()?;
    cfg.ct_mining.validate()?;
    Ok(cfg)
}

pub fn mine(ctx: &Context, a: MineArgs) -> anyhow::Result<()> {
    let mut params = MiningParams::new(a.minsup, a.maxlen);
    params.top_m = a.top_m;
    params.closedness = a.closedness;
    params.validate()?;
    let corpus = load_args(&a.corpus)?;
    let start = Instant::now();
    let frequent = mine_closed(&corpus.db, &params)?;
    let index = build_cooccurrence(&corpus.db, params.top_m)?;
    let took = start.elapsed();
    ctx.emit(&write_frequent(corpus.vocabulary(), &frequent))?;
    if let Some(path) = &a.index {
        emit(Some(path), &write_cooccurrence(corpus.vocabulary(), &index))?;
    }
    eprintln!(
        "closed tagsets: {} (min support {} of {} transactions), {} co-occurring pairs, {:.1} ms",
        frequent.len(),
        frequent.min_support(),
        corpus.db.len(),
        index.n_pairs(),
        took.as_secs_f64() * 1e3
    );
    Ok(())
}

pub fn induce(ctx: &Context, a: InduceArgs) -> anyhow::Result<()> {
    let params = MiningParams::new(a.minsup, a.maxlen);
    params.validate()?;
    let corpus = load_args(&a.corpus)?;
    if corpus.db.is_empty() {
        bail!("{} holds no transactions to induce a code table from", a.corpus.transactions.display());
    }
    let start = Instant::now();
    let candidates = mine_closed(&corpus.db, &params)?;
    let run = induce_traced::<f64>(&corpus.db, &candidates)?;
    let took = start.elapsed();
    ctx.emit(&run.table.write(corpus.vocabulary()))?;
    eprintln!(
        "code table: {} used of {} elements, {} candidates, {} accepted, {:.1} -> {:.1} bits, {:.1} ms",
        run.table.n_used(),
        run.table.len(),
        candidates.len(),
        run.accepted.len(),
        run.initial_size,
        run.final_size,
        took.as_secs_f64() * 1e3
    );
    Ok(())
}

fn input_labels(corpus: &Corpus, q: &Query) -> String {
    corpus.tag_labels(&q.input).collect::<Vec<_>>().join(",")
}

fn format_recommendations(corpus: &Corpus, answers: &[Recommendation], format: Format) -> String {
    let mut out = String::new();
    if format == Format::Markdown {
        out.push_str("| user | input | recommendations |\n|---|---|---|\n");
    }
    for r in answers {
        let items: Vec<String> = r
            .items
            .iter()
            .map(|(t, s)| format!("{}:{s:.6}", corpus.vocabulary().label(*t)))
            .collect();
        let user = corpus.users.label(r.query.user);
        let input = input_labels(corpus, &r.query);
        match format {
            Format::Tsv => {
                let _ = writeln!(out, "{user}\t{input}\t{}", items.join(","));
            }
            Format::Markdown => {
                let _ = writeln!(out, "| {user} | {input} | {} |", items.join(", "));
            }
        }
    }
    out
}

pub fn recommend(ctx: &Context, a: RecommendArgs) -> anyhow::Result<()> {
    let config = recommender(&a.model)?;
    require_inputs(a.source.source, a.corpus.graph.as_deref(), a.corpus.groups.as_deref())?;
    let selection = SourceSelection::new(
        a.source.source,
        a.source.source.takes_degree().then_some(a.source.degree),
    )
    .map_err(|e| anyhow!(e))?;
    let mut corpus = load_args(&a.corpus)?;
    let text = fs::read_to_string(&a.queries).with_context(|| format!("cannot read {}", a.queries.display()))?;
    let queries = parse_queries(&text, &mut corpus)?;

    let answers: Vec<Recommendation> = match (&a.cache_dir, selection.kind) {
        (Some(dir), SourceKind::Ck) if !corpus.db.is_empty() => {
            let cache = ModelCache::open(dir)?;
            let digest = InputFile::hash("transactions", &a.corpus.transactions)?.sha256;
            let (model, hit) = cache.model(&corpus.db, &digest, a.corpus.min_tags, &config)?;
            eprintln!("model: {}", if hit { "cached" } else { "mined and cached" });
            queries
                .iter()
                .map(|q| model.recommend(q, config.max_recommendations))
                .collect::<Result<_, _>>()?
        }
        _ => {
            let mut opts = PipelineOptions::new(config, selection);
            opts.fallback = Fallback {
                min_transactions: a.source.fallback_min,
            };
            opts.min_group_transactions = a.source.min_group_transactions;
            let (answers, stats) =
                answer_queries::<f64>(&corpus.db, &corpus.graph, &corpus.groups, &queries, None, &opts)?;
            eprintln!(
                "{} queries, {} models mined, {} fallbacks",
                queries.len(),
                stats.models_built,
                stats.fallbacks
            );
            answers.into_iter().map(|a: Answer| a.recommendation).collect()
        }
    };
    ctx.emit(&format_recommendations(&corpus, &answers, ctx.format))
}

fn resolve_sources(a: &EvalArgs) -> anyhow::Result<Vec<SourceSelection>> {
    let mut out: Vec<SourceSelection> = Vec::new();
    for s in &a.source {
        let sel = if s.contains(':') {
            s.parse::<SourceSelection>().map_err(|e| anyhow!(e))?
        } else {
            let kind: SourceKind = s.parse().map_err(|e: String| anyhow!(e))?;
            SourceSelection::new(kind, kind.takes_degree().then_some(a.degree)).map_err(|e| anyhow!(e))?
        };
        out.push(sel);
    }
    // community results are read against collective knowledge
    let has_ck = out.iter().any(|s| s.kind == SourceKind::Ck);
    if !has_ck {
        if let Some(i) = out.iter().position(|s| s.kind == SourceKind::CommunityBatched) {
            out.insert(i + 1, SourceSelection::ck());
        }
    }
    Ok(out)
}

fn eval_configs(ctx: &Context, a: &EvalArgs) -> anyhow::Result<Vec<EvalConfig>> {
    let sources = resolve_sources(a)?;
    let model = ModelArgs {
        method: a.method.first().copied().unwrap_or(crate::MethodArg::Far),
        nar_minsup: a.nar_minsup,
        far_minsup: a.far_minsup,
        maxlen: a.maxlen,
        top_m: a.top_m,
        limit: a.limit,
    };
    let mut runs = Vec::new();
    for &method in &a.method {
        let mut recommender = recommender(&model)?;
        recommender.method = method.into();
        for &k in &a.k {
            for &source in &sources {
                let mut cfg = EvalConfig::new(k, recommender.method, source);
                cfg.recommender = recommender.clone();
                cfg.split = a.split;
                cfg.seed = ctx.seed.unwrap_or(0);
                cfg.strategy = a.strategy;
                if let Some(n) = a.batch_size {
                    cfg.batch_policy = BatchPolicy::new(n, None).map_err(|e| anyhow!("--batch-size: {e}"))?;
                }
                cfg.fallback = Fallback {
                    min_transactions: a.fallback_min,
                };
                cfg.min_group_transactions = a.min_group_transactions;
                cfg.uk_degree = a.degree;
                cfg.validate()?;
                runs.push(cfg);
            }
        }
    }
    Ok(runs)
}

fn manifest_path(ctx: &Context, a: &EvalArgs) -> Option<PathBuf> {
    a.manifest.clone().or_else(|| {
        ctx.out.as_ref().map(|p| {
            let mut name = p.file_name().unwrap_or_default().to_owned();
            name.push(".manifest.json");
            p.with_file_name(name)
        })
    })
}

pub fn eval(ctx: &Context, a: EvalArgs) -> anyhow::Result<()> {
    let manifest = match &a.replay {
        Some(path) => {
            let m = RunManifest::read(path)?;
            m.verify_inputs()?;
            m
        }
        None => {
            let transactions = a.transactions.as_deref().expect("clap requires transactions");
            let runs = eval_configs(ctx, &a)?;
            for r in &runs {
                require_inputs(r.source.kind, a.graph.as_deref(), a.groups.as_deref())?;
            }
            let mut inputs = vec![InputFile::hash("transactions", transactions)?];
            if let Some(g) = &a.graph {
                inputs.push(InputFile::hash("graph", g)?);
            }
            if let Some(g) = &a.groups {
                inputs.push(InputFile::hash("groups", g)?);
            }
            RunManifest::new(ctx.seed.unwrap_or(0), a.min_tags, inputs, runs)
        }
    };
    let transactions = manifest
        .input("transactions")
        .ok_or_else(|| anyhow!("manifest lists no transactions file"))?;
    let corpus = load(
        transactions,
        manifest.input("graph"),
        manifest.input("groups"),
        manifest.min_tags,
    )?;
    let mut reports = Vec::with_capacity(manifest.runs.len());
    for cfg in &manifest.runs {
        let report = run_experiment(&corpus, cfg).with_context(|| {
            format!("{} {} k={}", cfg.recommender.method, cfg.source.label(), cfg.k)
        })?;
        reports.push(report);
    }
    ctx.emit(&emit_report(&reports, ctx.format.into()))?;
    if a.replay.is_none() {
        match manifest_path(ctx, &a) {
            Some(p) => emit(Some(&p), &manifest.to_json())?,
            None => eprint!("{}", manifest.to_json()),
        }
    }
    Ok(())
}

pub fn synth(ctx: &Context, a: SynthArgs) -> anyhow::Result<()> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str::<SynthConfig>(&text)
                .with_context(|| format!("{} is not a generator config", path.display()))?
        }
        None => SynthConfig::default(),
    };
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.users {
        cfg.users = n;
    }
    if let Some(n) = a.communities {
        cfg.communities = n;
    }
    if let Some(n) = a.casual_users {
        cfg.casual_users = n;
    }
    if let Some(n) = a.groups {
        cfg.group_count = n;
    }
    if let Some(p) = a.affinity {
        cfg.community_tag_affinity = p;
    }
    let corpus = generate(&cfg)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    for (name, text) in [
        ("transactions.tsv", write_transactions(&corpus)),
        ("graph.tsv", write_graph(&corpus)),
        ("groups.tsv", write_groups(&corpus)),
    ] {
        emit(Some(&a.out_dir.join(name)), &text)?;
    }
    let p = profile(&corpus.db, &corpus.graph);
    let summary = format!(
        "users\t{}\ntags\t{}\ntransactions\t{}\nedges\t{}\ngroups\t{}\nseed\t{}\n",
        p.users,
        p.tags,
        p.transactions,
        corpus.graph.n_edges(),
        corpus.groups.groups().count(),
        cfg.seed
    );
    ctx.emit(&summary)
}

pub fn batch_replay(ctx: &Context, a: ReplayArgs) -> anyhow::Result<()> {
    let config = recommender(&a.model)?;
    let policy = BatchPolicy::new(a.max_queries, a.max_wait.map(Duration::from_millis))
        .map_err(|e| anyhow!("invalid batch policy: {e}"))?;
    let selection = match a.degree {
        Some(n) => {
            require_inputs(SourceKind::SocialBatched, a.corpus.graph.as_deref(), None)?;
            SourceSelection::new(SourceKind::SocialBatched, Some(n))
        }
        None => SourceSelection::new(SourceKind::Batched, None),
    }
    .map_err(|e| anyhow!(e))?;
    let mut corpus = load_args(&a.corpus)?;
    let text = fs::read_to_string(&a.queries).with_context(|| format!("cannot read {}", a.queries.display()))?;
    let queries = parse_queries(&text, &mut corpus)?;
    let arrivals: Vec<Duration> = (0..queries.len() as u64)
        .map(|i| Duration::from_millis(i * a.interval_ms))
        .collect();
    let mut opts = PipelineOptions::new(config, selection);
    opts.policy = policy;
    opts.fallback = Fallback {
        min_transactions: a.fallback_min,
    };
    let (answers, stats) = answer_queries::<f64>(
        &corpus.db,
        &corpus.graph,
        &corpus.groups,
        &queries,
        Some(&arrivals),
        &opts,
    )?;
    let recs: Vec<Recommendation> = answers.into_iter().map(|a| a.recommendation).collect();
    ctx.emit(&format_recommendations(&corpus, &recs, ctx.format))?;
    let sizes: Vec<String> = stats.batches.iter().map(|(n, _)| n.to_string()).collect();
    let reasons: Vec<String> = stats.batches.iter().map(|(_, r)| r.to_string()).collect();
    eprintln!("queries\t{}", queries.len());
    eprintln!("batches\t{}", stats.batches.len());
    eprintln!("mining invocations\t{}", stats.models_built);
    eprintln!("batch sizes\t{}", sizes.join(","));
    eprintln!("close reasons\t{}", reasons.join(","));
    eprintln!("fallbacks\t{}", stats.fallbacks);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn community_gets_a_ck_partner() {
        let a = EvalArgs {
            transactions: None,
            graph: None,
            groups: None,
            min_tags: 2,
            method: vec![crate::MethodArg::Far],
            source: vec!["community".into(), "social-batched:2".into(), "uk".into()],
            degree: 3,
            k: vec![1],
            split: Default::default(),
            strategy: Default::default(),
            batch_size: None,
            fallback_min: 0,
            min_group_transactions: 1,
            nar_minsup: "0.0007".parse().unwrap(),
            far_minsup: "0.00007".parse().unwrap(),
            maxlen: 3,
            top_m: 50,
            limit: 10,
            manifest: None,
            replay: None,
        };
        let labels: Vec<String> = resolve_sources(&a).unwrap().iter().map(|s| s.label()).collect();
        assert_eq!(labels, ["GK", "CK", "D^2_batched", "UK"]);
        let sel = resolve_sources(&a).unwrap();
        assert_eq!(sel[3].degree, Some(3));
    }

    #[test]
    fn missing_graph_is_named() {
        let err = require_inputs(SourceKind::Uk, None, None).unwrap_err().to_string();
        assert!(err.contains("--graph"), "{err}");
        assert!(require_inputs(SourceKind::Ck, None, None).is_ok());
    }

    #[test]
    fn manifest_sits_next_to_output() {
        let ctx = Context {
            seed: None,
            out: Some(PathBuf::from("runs/table2.tsv")),
            format: Format::Tsv,
        };
        let a = crate::EvalArgs {
            transactions: None,
            graph: None,
            groups: None,
            min_tags: 2,
            method: vec![],
            source: vec![],
            degree: 1,
            k: vec![],
            split: Default::default(),
            strategy: Default::default(),
            batch_size: None,
            fallback_min: 0,
            min_group_transactions: 1,
            nar_minsup: "0.0007".parse().unwrap(),
            far_minsup: "0.00007".parse().unwrap(),
            maxlen: 3,
            top_m: 50,
            limit: 10,
            manifest: None,
            replay: None,
        };
        assert_eq!(manifest_path(&ctx, &a), Some(PathBuf::from("runs/table2.tsv.manifest.json")));
    }
}
