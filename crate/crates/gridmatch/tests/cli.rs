use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gridmatch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridmatch"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON value per line"))
        .collect()
}

fn gen(dir: &Path, seed: &str, eps: &str) {
    let out = gridmatch(
        dir,
        &[
            "gen",
            "--sets",
            "12",
            "--min-size",
            "1",
            "--max-size",
            "4",
            "--eps",
            eps,
            "--seed",
            seed,
            "--data",
            "data.jsonl",
            "--queries",
            "queries.jsonl",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_us");
    v
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&gridmatch(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&gridmatch(dir.path(), &["build"])), 1);
    assert_eq!(
        code(&gridmatch(dir.path(), &["query", "missing.idx", "missing.jsonl"])),
        1
    );
    assert_eq!(code(&gridmatch(dir.path(), &["--help"])), 0);
}

#[test]
fn gen_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    gen(a.path(), "5", "0.01");
    gen(b.path(), "5", "0.01");
    for f in ["data.jsonl", "queries.jsonl"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn unperturbed_queries_hit_their_source_at_the_finest_level() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "9", "0");
    let out = gridmatch(
        dir.path(),
        &[
            "query",
            "data.jsonl",
            "queries.jsonl",
            "--dmax",
            "12",
            "--rescore",
        ],
    );
    assert_eq!(code(&out), 0);
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 12);
    for (i, r) in reports.iter().enumerate() {
        assert_eq!(r["d_star"], 12);
        let matches = r["matches"].as_array().unwrap();
        assert!(matches
            .iter()
            .any(|m| m["id"] == format!("s{i}") && m["distance"] == 0.0));
    }
}

#[test]
fn saved_index_answers_like_an_in_memory_one() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "3", "0.02");
    for index in ["compact", "multisnap"] {
        let out = gridmatch(
            dir.path(),
            &[
                "build",
                "data.jsonl",
                "--index",
                index,
                "--dmax",
                "10",
                "-o",
                "x.idx",
            ],
        );
        assert_eq!(code(&out), 0);
        let from_file = gridmatch(dir.path(), &["query", "x.idx", "queries.jsonl", "--jobs", "3"]);
        let in_memory = gridmatch(
            dir.path(),
            &[
                "query",
                "data.jsonl",
                "queries.jsonl",
                "--index",
                index,
                "--dmax",
                "10",
            ],
        );
        assert_eq!(code(&from_file), 0);
        let a: Vec<_> = json_lines(&from_file).into_iter().map(strip_timing).collect();
        let b: Vec<_> = json_lines(&in_memory).into_iter().map(strip_timing).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r["index"] == index));
    }
}

#[test]
fn multisnap_stores_more_nodes() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "4", "0.01");
    let nodes = |index: &str| {
        let out = gridmatch(
            dir.path(),
            &["stats", "data.jsonl", "--index", index, "--dmax", "8"],
        );
        assert_eq!(code(&out), 0);
        json_lines(&out)[0]["nodes"].as_u64().unwrap()
    };
    assert!(nodes("multisnap") >= nodes("compact"));
}

#[test]
fn multisnap_rejects_subset_queries() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "4", "0.01");
    let out = gridmatch(
        dir.path(),
        &[
            "query",
            "data.jsonl",
            "queries.jsonl",
            "--index",
            "multisnap",
            "--mode",
            "subset",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn invalid_data_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("bad.jsonl"),
        "{\"id\":\"a\",\"points\":[[0.5,0.5]]}\n{\"id\":\"b\",\"points\":[[1.5,0.5]]}\n",
    )
    .unwrap();
    let out = gridmatch(dir.path(), &["build", "bad.jsonl"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.jsonl:2:"));

    fs::write(
        dir.path().join("pair.jsonl"),
        "{\"id\":\"a\",\"points\":[[0.5,0.5]]}\n{\"id\":\"b\",\"points\":[[0.1,0.5],[0.2,0.2]]}\n",
    )
    .unwrap();
    assert_eq!(code(&gridmatch(dir.path(), &["dist", "pair.jsonl"])), 2);
}

#[test]
fn dist_and_estimate() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("pair.jsonl"),
        "{\"id\":\"a\",\"points\":[[0.1,0.1],[0.6,0.6]]}\n{\"id\":\"b\",\"points\":[[0.62,0.6],[0.1,0.13]]}\n",
    )
    .unwrap();
    let exact = json_lines(&gridmatch(dir.path(), &["dist", "pair.jsonl"]))[0]["distance"]
        .as_f64()
        .unwrap();
    assert!((exact - 0.03).abs() < 1e-12);
    let out = gridmatch(dir.path(), &["dist-approx", "pair.jsonl", "--oracle"]);
    assert_eq!(code(&out), 0);
    let r = &json_lines(&out)[0];
    assert_eq!(r["exact"].as_f64().unwrap(), exact);
    assert!(r["lower"].as_f64().unwrap() <= exact && exact <= r["upper"].as_f64().unwrap());
}

#[test]
fn validate_runs_clean() {
    let dir = TempDir::new().unwrap();
    let out = gridmatch(dir.path(), &["validate", "--size", "0"]);
    assert_eq!(code(&out), 0);
    let out = gridmatch(dir.path(), &["validate", "--size", "10", "--jobs", "2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("all hard assertions held"));
}

#[test]
fn injected_fault_is_caught_and_replays() {
    let dir = TempDir::new().unwrap();
    let out = gridmatch(
        dir.path(),
        &["validate", "--size", "20", "--inject-fault", "--suite", "windows"],
    );
    assert_eq!(code(&out), 3);
    let dumps: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("counterexample-windows-")
        })
        .collect();
    assert_eq!(dumps.len(), 1);
    let replay = gridmatch(dir.path(), &["validate", "--replay", dumps[0].to_str().unwrap()]);
    assert_eq!(code(&replay), 3);
    assert!(stdout(&replay).starts_with("reproduced"));
}
