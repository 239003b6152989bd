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

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_socialtag"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    o
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let config = dir.path().join("synth.json");
        fs::write(
            &config,
            r#"{"users": 30, "casual_users": 10, "group_count": 3, "seed": 5}"#,
        )
        .unwrap();
        let f = Fixture { dir };
        ok(&["synth", "--config", f.s("synth.json"), "--out-dir", f.s("")]);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> &str {
        let p = self.path(name);
        Box::leak(p.into_os_string().into_string().unwrap().into_boxed_str())
    }

    /// The first `n` transactions as queries, one input tag each.
    fn queries(&self, n: usize) -> &str {
        let text = fs::read_to_string(self.path("transactions.tsv")).unwrap();
        let mut out = String::new();
        for line in text.lines().take(n) {
            let f: Vec<&str> = line.split('\t').collect();
            let tag = f[3].split(',').next().unwrap();
            out.push_str(&format!("{}\t{}\t{}\n", f[0], f[2], tag));
        }
        let name = format!("queries{n}.tsv");
        fs::write(self.path(&name), out).unwrap();
        self.s(&name)
    }
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn synth_writes_three_files() {
    let f = Fixture::new();
    for name in ["transactions.tsv", "graph.tsv", "groups.tsv"] {
        assert!(!read(&f.path(name)).is_empty(), "{name} is empty");
    }
}

#[test]
fn mine_is_byte_identical_across_runs() {
    let f = Fixture::new();
    let tx = f.s("transactions.tsv");
    let args = ["mine", "--minsup", "0.01", "--maxlen", "3", "--top-m", "50", tx];
    let a = ok(&args);
    let b = ok(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).contains("closed tagsets"));

    ok(&["mine", "--out", f.s("f.txt"), "--index", f.s("cooc.txt"), tx]);
    assert!(read(&f.path("f.txt")).starts_with("# closed-tagsets"));
    assert!(read(&f.path("cooc.txt")).starts_with("# cooccurrence"));
}

#[test]
fn bad_minsup_is_a_config_error() {
    let f = Fixture::new();
    let o = run(&["mine", "--minsup", "1.5", f.s("transactions.tsv")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("minimum support"), "{}", stderr(&o));
}

#[test]
fn induce_writes_a_code_table_and_rejects_empty_corpora() {
    let f = Fixture::new();
    let o = ok(&["induce", "--minsup", "0.00007", "--maxlen", "3", f.s("transactions.tsv")]);
    assert!(stdout(&o).starts_with("# code-table"));

    fs::write(f.path("empty.tsv"), "").unwrap();
    let o = run(&["induce", f.s("empty.tsv")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no transactions"), "{}", stderr(&o));
}

#[test]
fn eval_without_graph_names_the_missing_file() {
    let f = Fixture::new();
    let o = run(&["eval", "--source", "uk", "--k", "2", f.s("transactions.tsv")]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("graph") && err.contains("--graph"), "{err}");
}

fn without_time(tsv: &str) -> Vec<Vec<String>> {
    let mut rows = tsv.lines().map(|l| l.split('\t').map(str::to_owned).collect::<Vec<_>>());
    let header = rows.next().unwrap();
    let time = header.iter().position(|h| h == "time_ms").unwrap();
    rows.map(|mut r| {
        r.remove(time);
        r
    })
    .collect()
}

#[test]
fn eval_manifest_replays_to_the_same_metrics() {
    let f = Fixture::new();
    let out = f.s("report.tsv");
    ok(&[
        "eval",
        "--seed",
        "3",
        "--out",
        out,
        "--method",
        "far,par",
        "--source",
        "ck,uk",
        "--k",
        "1,2",
        "--graph",
        f.s("graph.tsv"),
        f.s("transactions.tsv"),
    ]);
    let first = read(&f.path("report.tsv"));
    assert_eq!(first.lines().count(), 1 + 2 * 2 * 2);
    let manifest = read(&f.path("report.tsv.manifest.json"));
    let json: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(json["seed"], 3);
    assert_eq!(json["runs"].as_array().unwrap().len(), 8);
    assert_eq!(json["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    ok(&["eval", "--replay", f.s("report.tsv.manifest.json"), "--out", f.s("again.tsv")]);
    let again = read(&f.path("again.tsv"));
    assert_eq!(without_time(&first), without_time(&again));

    // a changed input invalidates the manifest
    let tx = f.path("transactions.tsv");
    let mut text = read(&tx);
    text.push_str("u0\t-\tc0\tc0_1,c0_2\n");
    fs::write(&tx, text).unwrap();
    let o = run(&["eval", "--replay", f.s("report.tsv.manifest.json")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("changed"), "{}", stderr(&o));
}

#[test]
fn community_eval_pairs_with_ck() {
    let f = Fixture::new();
    let o = ok(&[
        "eval",
        "--format",
        "markdown",
        "--source",
        "community",
        "--k",
        "1",
        "--groups",
        f.s("groups.tsv"),
        "--manifest",
        f.s("m.json"),
        f.s("transactions.tsv"),
    ]);
    let text = stdout(&o);
    assert!(text.contains("| GK |"), "{text}");
    assert!(text.contains("| CK |"), "{text}");
}

#[test]
fn batch_replay_counts_batches_and_mining() {
    let f = Fixture::new();
    let q = f.queries(250);
    let o = ok(&["batch-replay", "--queries", q, "--max-queries", "100", f.s("transactions.tsv")]);
    let err = stderr(&o);
    assert!(err.contains("batches\t3\n"), "{err}");
    assert!(err.contains("mining invocations\t3\n"), "{err}");
    assert!(err.contains("batch sizes\t100,100,50\n"), "{err}");
    assert_eq!(stdout(&o).lines().count(), 250);
}

#[test]
fn batch_replay_wait_bound_and_degree() {
    let f = Fixture::new();
    let q = f.queries(20);
    let o = ok(&[
        "batch-replay",
        "--queries",
        q,
        "--max-queries",
        "100",
        "--max-wait",
        "50",
        "--interval-ms",
        "10",
        "--degree",
        "2",
        "--graph",
        f.s("graph.tsv"),
        f.s("transactions.tsv"),
    ]);
    let err = stderr(&o);
    // arrivals at 0,10,..; a batch opened at t closes at t+50
    assert!(err.contains("batch sizes\t5,5,5,5\n"), "{err}");
    assert!(err.contains("close reasons\tMAX_WAIT,MAX_WAIT,MAX_WAIT,FLUSH\n"), "{err}");

    let o = run(&["batch-replay", "--queries", q, "--degree", "2", f.s("transactions.tsv")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--graph"));
}

#[test]
fn empty_stream_exits_cleanly() {
    let f = Fixture::new();
    fs::write(f.path("none.tsv"), "").unwrap();
    let o = ok(&["batch-replay", "--queries", f.s("none.tsv"), f.s("transactions.tsv")]);
    assert!(stderr(&o).contains("batches\t0\n"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn recommend_reuses_the_model_cache() {
    let f = Fixture::new();
    let q = f.queries(15);
    let args = [
        "recommend",
        "--queries",
        q,
        "--cache-dir",
        f.s("cache"),
        "--limit",
        "5",
        f.s("transactions.tsv"),
    ];
    let first = ok(&args);
    assert!(stderr(&first).contains("mined and cached"));
    let second = ok(&args);
    assert!(stderr(&second).contains("model: cached"));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&first).lines().count(), 15);
    assert!(fs::read_dir(f.path("cache")).unwrap().count() >= 2);

    // personomies are mined per query and bypass the cache
    let o = ok(&["recommend", "--queries", q, "--source", "personomy", f.s("transactions.tsv")]);
    assert_eq!(stdout(&o).lines().count(), 15);
}

#[test]
fn unknown_flags_are_errors_and_help_shows_defaults() {
    let o = run(&["mine", "--frobnicate", "x.tsv"]);
    assert!(!o.status.success());
    for cmd in ["mine", "induce", "recommend", "eval", "synth", "batch-replay"] {
        let o = ok(&[cmd, "--help"]);
        let help = stdout(&o);
        assert!(help.contains("--seed") && help.contains("--out") && help.contains("--format"), "{cmd}");
        if cmd != "synth" {
            assert!(help.contains("[default:"), "{cmd} help lists no defaults");
        }
    }
}
