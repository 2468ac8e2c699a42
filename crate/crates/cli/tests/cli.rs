use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn otindex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otindex"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = otindex(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn preprocess_strips_headers_without_trailing_newline() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("in.fa");
    let txt = dir.path().join("out.txt");
    fs::write(&fa, ">seq one\nacgt\r\nNNAC\n>seq two\nggt\n").unwrap();
    ok(&["preprocess", p(&fa), p(&txt)]);
    assert_eq!(fs::read(&txt).unwrap(), b"ACGTNNACGGT");
}

#[test]
fn build_query_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("t.txt");
    let idx = dir.path().join("t.otix");
    fs::write(&txt, "MISSISSIPPI").unwrap();

    let stats = ok(&["stats", p(&txt)]);
    assert!(stats.starts_with("row\tvalue\n"));
    assert!(stats.contains("No. of alphabets\t4\n"));
    assert!(stats.contains("No. of nuc/leaf nodes\t11\n"));

    let oshr = ok(&["oshr-stats", p(&txt)]);
    assert!(oshr.contains("OSHR internal nodes\t"));

    ok(&["build", p(&txt), "-o", p(&idx)]);
    let istats = ok(&["index-stats", p(&idx)]);
    assert!(istats.contains("Size of index of base paths\t"));
    assert!(istats.contains("Total size of three indexes\t"));

    let q = ok(&[
        "query",
        p(&idx),
        p(&txt),
        "--pattern",
        "SI",
        "--node",
        "S",
        "--baseline",
    ]);
    let rows: Vec<&str> = q.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("index\tSI\t"));
    assert_eq!(rows[1].split('\t').nth(4), Some("true"));
    assert_eq!(rows[2].split('\t').nth(4), Some("true"));

    // "IM" does not occur.
    let q = ok(&[
        "query",
        p(&idx),
        p(&txt),
        "--pattern",
        "M",
        "--node",
        "I",
        "--baseline",
    ]);
    assert_eq!(q.lines().nth(1).unwrap().split('\t').nth(4), Some("false"));

    assert!(
        !otindex(&["query", p(&idx), p(&txt), "--pattern", "S", "--node", "QQ"])
            .status
            .success()
    );
}

#[test]
fn wrong_text_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("t.txt");
    let other = dir.path().join("o.txt");
    let idx = dir.path().join("t.otix");
    fs::write(&txt, "BANANA").unwrap();
    fs::write(&other, "BANANAS").unwrap();
    ok(&["build", p(&txt), "-o", p(&idx)]);
    let out = otindex(&["query", p(&idx), p(&other), "--pattern", "A", "--node", ""]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash mismatch"));
}

#[test]
fn length_mode_rejects_other_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("t.txt");
    let idx = dir.path().join("t.otix");
    fs::write(&txt, "ACGTACGGTACCA").unwrap();
    ok(&["build", p(&txt), "-o", p(&idx), "--length-mode", "exact:2"]);
    ok(&["query", p(&idx), p(&txt), "--pattern", "CG", "--node", "A"]);
    assert!(
        !otindex(&["query", p(&idx), p(&txt), "--pattern", "CGT", "--node", "A"])
            .status
            .success()
    );
}

#[test]
fn audit_small_corpus() {
    let out = otindex(&[
        "audit",
        "--texts",
        "4",
        "--max-n",
        "64",
        "--configs",
        "literal,union+ext",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let tsv = String::from_utf8(out.stdout).unwrap();
    assert!(tsv.starts_with("config\ttexts\t"));
    assert_eq!(tsv.lines().count(), 3);
}

#[test]
fn audit_fails_when_every_config_misses() {
    let out = otindex(&[
        "audit",
        "--texts",
        "6",
        "--max-n",
        "64",
        "--configs",
        "literal",
        "--no-minimize",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bench_emits_schema() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("g.fa");
    let txt = dir.path().join("g.txt");
    let idx = dir.path().join("g.otix");
    let rep = dir.path().join("r.tsv");
    ok(&["synth", p(&fa), "--len", "20000", "--seed", "3"]);
    ok(&["preprocess", p(&fa), p(&txt)]);
    assert_eq!(fs::read(&txt).unwrap().len(), 20000);
    ok(&["build", p(&txt), "-o", p(&idx)]);
    ok(&[
        "bench",
        p(&idx),
        p(&txt),
        "--cap",
        "20",
        "--max-depth",
        "5",
        "-o",
        p(&rep),
    ]);
    let tsv = fs::read_to_string(&rep).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(
        lines.next(),
        Some("depth\tnodes_at_depth\tpatterns\tstarting_nodes\tcomplexity\tot_time_s\twalk_time_s\tot_probes\twalk_comparisons")
    );
    assert_eq!(lines.count(), 5);
}
