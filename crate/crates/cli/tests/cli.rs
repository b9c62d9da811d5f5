use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/eagles")
}

fn spex(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spex"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn spex")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = spex(dir, args);
    assert!(
        out.status.success(),
        "spex {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for f in [
        "collection.tsv",
        "queries.tsv",
        "gazetteer.tsv",
        "qrels.txt",
    ] {
        fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    dir
}

/// annotate -> expand -> index -> search x3 -> fuse -> oracle -> eval
fn pipeline(dir: &Path) -> String {
    for (input, ann) in [
        ("collection.tsv", "docs.jsonl"),
        ("queries.tsv", "queries.jsonl"),
    ] {
        ok(
            dir,
            &[
                "annotate",
                "--input",
                input,
                "--gazetteer",
                "gazetteer.tsv",
                "--out",
                ann,
            ],
        );
    }
    for form in ["explicit", "hashed"] {
        ok(
            dir,
            &[
                "expand",
                "--input",
                "collection.tsv",
                "--annotations",
                "docs.jsonl",
                "--form",
                form,
                "--out",
                &format!("docs.{form}.tsv"),
            ],
        );
        ok(
            dir,
            &[
                "expand",
                "--input",
                "queries.tsv",
                "--annotations",
                "queries.jsonl",
                "--form",
                form,
                "--out",
                &format!("queries.{form}.tsv"),
            ],
        );
    }
    ok(
        dir,
        &[
            "index",
            "--collection",
            "collection.tsv",
            "--out",
            "none.idx",
        ],
    );
    ok(
        dir,
        &[
            "search",
            "--index",
            "none.idx",
            "--queries",
            "queries.tsv",
            "--tag",
            "none",
            "--out",
            "none.trec",
        ],
    );
    for form in ["explicit", "hashed"] {
        ok(
            dir,
            &[
                "index",
                "--collection",
                &format!("docs.{form}.tsv"),
                "--out",
                &format!("{form}.idx"),
            ],
        );
        ok(
            dir,
            &[
                "search",
                "--index",
                &format!("{form}.idx"),
                "--queries",
                &format!("queries.{form}.tsv"),
                "--tag",
                form,
                "--out",
                &format!("{form}.trec"),
            ],
        );
    }
    let runs = ["none.trec", "explicit.trec", "hashed.trec"];
    ok(
        dir,
        &[&["fuse"][..], &runs, &["--k", "60", "--out", "rrf.trec"]].concat(),
    );
    ok(
        dir,
        &[
            &["oracle"][..],
            &runs,
            &["--qrels", "qrels.txt", "--out", "oracle.trec"],
        ]
        .concat(),
    );
    let mut report = String::new();
    for run in [
        "none.trec",
        "explicit.trec",
        "hashed.trec",
        "rrf.trec",
        "oracle.trec",
    ] {
        report += &ok(
            dir,
            &[
                "eval",
                "--run",
                run,
                "--qrels",
                "qrels.txt",
                "--metric",
                "recall@5",
                "--metric",
                "mrr@10",
            ],
        );
    }
    report
}

#[test]
fn toy_pipeline_end_to_end() {
    let dir = setup();
    let start = Instant::now();
    let report = pipeline(dir.path());
    assert!(
        start.elapsed().as_secs_f64() < 5.0,
        "pipeline took {:?}",
        start.elapsed()
    );
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "recall@5\tall\t0.5000");
    assert_eq!(lines[2], "recall@5\tall\t1.0000");
    assert_eq!(lines[6], "recall@5\tall\t1.0000");
    assert_eq!(lines[8], "recall@5\tall\t1.0000");

    let rrf = fs::read_to_string(dir.path().join("rrf.trec")).unwrap();
    assert!(rrf.lines().all(|l| l.ends_with("rrf-none+explicit+hashed")));
    let meta = fs::read_to_string(dir.path().join("docs.jsonl.meta")).unwrap();
    assert!(meta.contains("threshold = 4.5"));
    let hashed = fs::read_to_string(dir.path().join("queries.hashed.tsv")).unwrap();
    assert!(hashed.contains("457e38cd8f6a6c4145a2038dc309f9e8"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = setup();
    let b = setup();
    assert_eq!(pipeline(a.path()), pipeline(b.path()));
    for f in [
        "docs.jsonl",
        "explicit.idx",
        "explicit.trec",
        "rrf.trec",
        "oracle.trec",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
    ok(
        a.path(),
        &[
            "--threads",
            "1",
            "search",
            "--index",
            "none.idx",
            "--queries",
            "queries.tsv",
            "--tag",
            "none",
            "--out",
            "again.trec",
        ],
    );
    assert_eq!(
        fs::read(a.path().join("none.trec")).unwrap(),
        fs::read(a.path().join("again.trec")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(spex(d, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(spex(d, &["eval", "--run"]).status.code(), Some(1));
    assert_eq!(spex(d, &["--help"]).status.code(), Some(0));

    let v = spex(d, &["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains("index format 1"));

    let missing = spex(d, &["eval", "--run", "nope.trec", "--qrels", "qrels.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.trec"));

    fs::write(d.join("bad.trec"), "q1 Q0 d1 one 1.0 t\n").unwrap();
    assert_eq!(
        spex(d, &["eval", "--run", "bad.trec", "--qrels", "qrels.txt"])
            .status
            .code(),
        Some(2)
    );

    fs::write(d.join("ok.trec"), "q1 Q0 d01 1 1.0 t\n").unwrap();
    assert_eq!(
        spex(
            d,
            &[
                "eval",
                "--run",
                "ok.trec",
                "--qrels",
                "qrels.txt",
                "--metric",
                "bogus@3"
            ]
        )
        .status
        .code(),
        Some(1)
    );
    fs::write(d.join("not-an-index"), "hello").unwrap();
    assert_eq!(
        spex(
            d,
            &[
                "search",
                "--index",
                "not-an-index",
                "--queries",
                "queries.tsv"
            ]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn flags_override_config() {
    let dir = setup();
    let d = dir.path();
    ok(
        d,
        &["index", "--collection", "collection.tsv", "--out", "c.idx"],
    );
    fs::write(d.join("spex.conf"), "# shallow runs\ntopk = 2\nk1 = 1.2\n").unwrap();
    let from_config = ok(
        d,
        &[
            "--config",
            "spex.conf",
            "search",
            "--index",
            "c.idx",
            "--queries",
            "queries.tsv",
        ],
    );
    assert_eq!(
        from_config.lines().filter(|l| l.starts_with("q1 ")).count(),
        2
    );
    let from_flag = ok(
        d,
        &[
            "--config",
            "spex.conf",
            "search",
            "--index",
            "c.idx",
            "--queries",
            "queries.tsv",
            "--topk",
            "3",
        ],
    );
    assert_eq!(
        from_flag.lines().filter(|l| l.starts_with("q1 ")).count(),
        3
    );

    fs::write(d.join("typo.conf"), "topkk = 2\n").unwrap();
    let out = spex(
        d,
        &[
            "--config",
            "typo.conf",
            "search",
            "--index",
            "c.idx",
            "--queries",
            "queries.tsv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluation_side_commands() {
    let dir = setup();
    let d = dir.path();
    pipeline(d);

    let curve = ok(
        d,
        &[
            "curve",
            "none.trec",
            "explicit.trec",
            "--qrels",
            "qrels.txt",
            "--cutoffs",
            "0,5,10",
        ],
    );
    assert_eq!(
        curve,
        "recall\tnone\texplicit\n0\t0.0000\t0.0000\n5\t0.5000\t1.0000\n10\t1.0000\t1.0000\n"
    );

    ok(
        d,
        &[
            "labels",
            "none.trec",
            "explicit.trec",
            "hashed.trec",
            "--qrels",
            "qrels.txt",
            "--out",
            "labels.tsv",
        ],
    );
    assert_eq!(
        fs::read_to_string(d.join("labels.tsv")).unwrap(),
        "q1\t1\nq2\t0\n"
    );
    ok(
        d,
        &[
            "select",
            "none.trec",
            "explicit.trec",
            "hashed.trec",
            "--assignment",
            "labels.tsv",
            "--out",
            "sel.trec",
        ],
    );
    assert_eq!(
        ok(
            d,
            &[
                "eval",
                "--run",
                "sel.trec",
                "--qrels",
                "qrels.txt",
                "--metric",
                "recall@5"
            ]
        ),
        "recall@5\tall\t1.0000\n"
    );

    let pool = ok(d, &["pool", "none.trec", "explicit.trec"]);
    assert!(pool.lines().any(|l| l == "q1\td01\t2\tnone,explicit"));

    fs::write(
        d.join("s1.tsv"),
        "q1\td1\t0.2\nq1\td2\t0.9\nq2\tb\t1\nq2\ta\t1\n",
    )
    .unwrap();
    fs::write(
        d.join("s2.tsv"),
        "q1\td1\t5\nq1\td2\t1\nq2\ta\t0\nq2\tb\t0\n",
    )
    .unwrap();
    assert_eq!(
        ok(d, &["qrels-top1", "--scores", "s1.tsv"]),
        "q1 0 d2 1\nq2 0 a 1\n"
    );
    assert_eq!(
        ok(
            d,
            &["qrels-duo", "--stage1", "s1.tsv", "--stage2", "s2.tsv"]
        ),
        "q1 0 d1 1\nq2 0 a 1\n"
    );
    fs::write(d.join("s2short.tsv"), "q1\td1\t5\n").unwrap();
    let out = spex(
        d,
        &["qrels-duo", "--stage1", "s1.tsv", "--stage2", "s2short.tsv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q1 d2"));

    fs::write(d.join("hard.txt"), "q1\nq9\n").unwrap();
    ok(
        d,
        &[
            "filter",
            "--ids",
            "hard.txt",
            "--queries",
            "queries.tsv",
            "--qrels",
            "qrels.txt",
            "--run",
            "none.trec",
            "--out-dir",
            "hard",
        ],
    );
    assert_eq!(
        fs::read_to_string(d.join("hard/qrels.txt")).unwrap(),
        "q1 0 d01 1\n"
    );
    assert!(fs::read_to_string(d.join("hard/none.trec"))
        .unwrap()
        .lines()
        .all(|l| l.starts_with("q1 ")));

    let stats = ok(d, &["stats", "--index", "none.idx"]);
    assert!(stats.starts_with("documents\t20\n"));
}
