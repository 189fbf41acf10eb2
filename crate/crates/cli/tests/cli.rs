use std::path::PathBuf;
use std::process::{Command, Output};

use rmlab::codes::Code;
use rmlab::io;
use rmlab::verify::{self, ScanMode};
use serde_json::Value;

fn rmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmlab")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rmlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn construct(name: &str, args: &[&str]) -> PathBuf {
    let path = scratch(name);
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = rmlab(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn construct_and_verify_schmidt() {
    let path = construct("s.json", &["--family", "schmidt-sym", "--q", "3", "--n", "4", "--d", "2", "--s", "1"]);
    let out = rmlab(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["min_distance"], 2);
    assert_eq!(report["size"], "6561");
    assert_eq!(report["is_maximum"], true);
    assert_eq!(report["rank_spectrum"]["3"], 2160);
}

#[test]
fn round_trip_matches_in_memory_verification() {
    let path = construct("h.json", &["--family", "hermitian-h", "--q", "2", "--n", "3", "--d", "2", "--s", "1"]);
    let file_code = io::load_code(&path).unwrap();
    let code = Code::hermitian_h(2, 3, 2, 1).unwrap();
    assert_eq!(file_code, code);
    let report = json(&rmlab(&["verify", path.to_str().unwrap()]));
    let memory = verify::verify_code(&code, ScanMode::Spectrum, 1 << 30).unwrap();
    assert_eq!(report["rank_spectrum"], serde_json::to_value(&memory.rank_spectrum).unwrap());
    assert_eq!(report["min_distance"], serde_json::to_value(memory.min_distance).unwrap());
}

#[test]
fn assert_mode_agrees_with_spectrum_mode() {
    let path = construct("a.json", &["--family", "dg-alt", "--q", "2", "--n", "5", "--d", "2", "--s", "1"]);
    let spectrum = rmlab(&["verify", path.to_str().unwrap()]);
    let asserted = rmlab(&["verify", path.to_str().unwrap(), "--mode", "assert-d"]);
    assert_eq!(spectrum.status.code(), Some(0));
    assert_eq!(asserted.status.code(), Some(0));
}

#[test]
fn failing_check_exits_one() {
    let path = construct("bad.json", &["--family", "schmidt-sym", "--q", "3", "--n", "4", "--d", "2", "--s", "1"]);
    let text = std::fs::read_to_string(&path).unwrap().replace("\"d\": 2", "\"d\": 3");
    std::fs::write(&path, text).unwrap();
    let out = rmlab(&["verify", path.to_str().unwrap(), "--mode", "assert-d"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL min-distance"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rmlab(&["verify", "/nonexistent/code.json"]).status.code(), Some(2));
    assert_eq!(rmlab(&["construct", "--family", "nope", "--q", "3", "-o", "x.json"]).status.code(), Some(2));
    assert_eq!(rmlab(&["bounds", "--setting", "sym", "--q", "6", "--n", "4", "--d", "2"]).status.code(), Some(2));
    assert_eq!(rmlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rmlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn bounds_output() {
    let out = rmlab(&["bounds", "--setting", "sym", "--q", "3", "--n", "4", "--d", "2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "6561");
    let out = rmlab(&["bounds", "--setting", "sym", "--q", "3", "--n", "4"]);
    let lines: Vec<String> = String::from_utf8_lossy(&out.stdout).lines().map(String::from).collect();
    assert_eq!(lines, ["d=1 59049", "d=2 6561", "d=3 243", "d=4 81"]);
}

#[test]
fn monomial_search_and_census() {
    let a = construct("m1.json", &["--family", "schmidt-sym", "--q", "3", "--n", "4", "--d", "2", "--s", "1"]);
    let b = construct("m3.json", &["--family", "schmidt-sym", "--q", "3", "--n", "4", "--d", "2", "--s", "3"]);
    let out = rmlab(&["equiv-search", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["found"], true);
    let out = rmlab(&["aut", a.to_str().unwrap()]);
    assert!(out.status.success());
    let census = json(&out);
    assert_eq!(census["fixing"], census["tuples"]);
}

#[test]
fn shard_union_equals_whole_search() {
    let a = construct("f1.json", &["--family", "schmidt-sym", "--q", "2", "--n", "3", "--d", "1", "--s", "1"]);
    let whole = json(&rmlab(&["equiv-search", a.to_str().unwrap(), a.to_str().unwrap(), "--mode", "full", "--shards", "3"]));
    assert_eq!(whole["found"], true);
    let mut scanned = 0;
    let mut maps = Vec::new();
    for i in 0..3 {
        let shard = format!("{i}/3");
        let part = json(&rmlab(&["equiv-search", a.to_str().unwrap(), a.to_str().unwrap(), "--mode", "full", "--shard", &shard]));
        scanned += part["candidates_scanned"].as_u64().unwrap();
        if part["found"] == true {
            maps.push((part["hit"].clone(), part["map"].clone()));
        }
    }
    maps.sort_by_key(|(hit, _)| (hit[0].as_u64(), hit[1].as_u64()));
    assert_eq!(maps[0].1, whole["map"]);
    assert!(scanned >= whole["candidates_scanned"].as_u64().unwrap());
}

#[test]
fn char_check_runs() {
    let path = construct("c.json", &["--family", "schmidt-sym", "--q", "3", "--n", "4", "--d", "2", "--s", "1"]);
    let out = rmlab(&["char-check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn demo_is_deterministic_for_a_seed() {
    let run = || rmlab(&["demo", "--criteria", "5,7", "--seed", "17"]);
    let (a, b) = (run(), run());
    assert!(a.status.success());
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .map(|l| l.split(" (").next().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(strip(&a).len(), 2);
}

#[test]
fn eta_selects_a_field_power() {
    let path = construct("t.json", &["--family", "punctured-t", "--q", "2", "--n", "4", "--d", "3", "--s", "1", "--eta", "3"]);
    let code = io::load_code(&path).unwrap();
    assert_eq!(rmlab::Elem(code.params.eta.unwrap()), code.field().gen_power(3));
}
