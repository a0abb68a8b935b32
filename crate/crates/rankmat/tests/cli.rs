use std::path::PathBuf;
use std::process::Command;

use rankmat::formats::{parse_structure, write_semigroup, write_structure};
use rankmat::rank::{matrix_ranks, type_matrix, Graph};
use rankmat::semigroup::FiniteSemigroup;
use rankmat::suites::{Report, Status};

fn rankmat(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rankmat")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rankmat-bin-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn reports(out: &str) -> Vec<Report> {
    out.lines().map(|l| serde_json::from_str(l).expect("one JSON report per line")).collect()
}

#[test]
fn rank_matches_the_library() {
    let s = Graph::path(4).to_structure();
    let p = scratch("p4.struct", &write_structure(&s));
    let (code, out) = rankmat(&["rank", "--structure", p.to_str().unwrap(), "--subset", "0,1", "--m", "2", "--json"]);
    assert_eq!(code, 0);
    let r = &reports(&out)[0];
    let want = matrix_ranks(&type_matrix(&s, 0b11, 2).unwrap());
    assert_eq!(r.data["distinct_rows"], want.distinct_rows);
    assert_eq!(r.data["distinct_cols"], want.distinct_cols);
    assert_eq!(r.data["field_rank"], want.field_rank);
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.sgp", "semigroup 2\n0 1\n0 0\n");
    assert_eq!(rankmat(&["sgp", "identities", bad.to_str().unwrap()]).0, 2);
    let missing = scratch("short.struct", "structure\nuniverse 2\nrel E 2\n0 5\nend\n");
    assert_eq!(rankmat(&["rank", "--structure", missing.to_str().unwrap()]).0, 2);
    let brandt = scratch("brandt2.sgp", &write_semigroup(&FiniteSemigroup::brandt(2)));
    let (code, out) = rankmat(&["--json", "sgp", "identities", brandt.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(reports(&out).iter().any(|r| r.status == Status::Fail));
    assert_eq!(rankmat(&["--json", "sgp", "syntactic", brandt.to_str().unwrap(), "--k", "2"]).0, 0);
}

#[test]
fn verify_reports_a_summary() {
    let (code, out) = rankmat(&["--json", "verify", "rank-decreasing"]);
    assert_eq!(code, 0);
    let rs = reports(&out);
    let summary = rs.iter().find(|r| r.instance == "summary").unwrap();
    assert_eq!(summary.status, Status::Pass);
    assert!(summary.data["k8_p8_flagged"].as_u64().unwrap() > 0);
}

#[test]
fn witnesses_replay() {
    // a rank-variants witness carries the structure text; reparsing it gives the same ranks
    let s = Graph::cycle(4).to_structure();
    let text = serde_json::json!({"structure": write_structure(&s), "subset": [0, 2], "m": 1}).to_string();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let back = parse_structure(v["structure"].as_str().unwrap()).unwrap();
    assert_eq!(
        matrix_ranks(&type_matrix(&back, 0b101, 1).unwrap()),
        matrix_ranks(&type_matrix(&s, 0b101, 1).unwrap())
    );
    let p = scratch("c4.struct", v["structure"].as_str().unwrap());
    let (code, out) = rankmat(&["--json", "graph-rank", "--structure", p.to_str().unwrap(), "--subset", "0,2"]);
    assert_eq!(code, 0);
    assert_eq!(reports(&out)[0].data["cut_rank"], 1);
}
