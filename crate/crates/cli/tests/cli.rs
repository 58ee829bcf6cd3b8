use std::process::{Command, Output};

use serde_json::Value;

fn partcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partcx")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn theorem_four_covers_25_trees() {
    let out = partcx(&["verify-theorem", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tree_count"], 25);
    assert_eq!(v["pass"], true);
    assert_eq!(v["model"], "sd-model");
}

#[test]
fn injected_fault_fails_with_counterexample() {
    let out = partcx(&["verify-theorem", "--n", "4", "--inject-fault", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["failures"], 1);
    let bad = v["trees"].as_array().unwrap().iter().find(|t| t["pass"] == false).unwrap();
    assert!(bad["cone_ok"].as_array().unwrap().iter().any(|w| !w["counterexample"].is_null()));
}

#[test]
fn np_six_text_table() {
    let out = partcx(&["homology", "np", "--n", "6", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("H~_3 = Z^120"), "{s}");
    assert!(s.contains("H~_2 = 0"), "{s}");
}

#[test]
fn bar_compare_comm_three() {
    let out = partcx(&["bar-compare", "comm", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for side in v["sides"].as_array().unwrap() {
        assert_eq!(side["equal"], true);
        for h in [&side["bar"], &side["tree"]] {
            let d2 = h["degrees"].as_array().unwrap().iter().find(|d| d["degree"] == 2).unwrap();
            assert_eq!(d2["betti"], 2);
        }
    }
}

#[test]
fn labelled_assoc_three() {
    let out = partcx(&["verify-labelled", "--operad", "assoc", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["f_vector"], serde_json::json!([12]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(partcx(&["homology", "np"]).status.code(), Some(2));
    assert_eq!(partcx(&["bar-compare", "nosuch", "--n", "3"]).status.code(), Some(2));
    assert_eq!(partcx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(partcx(&["verify-labelled", "comm", "--n", "7"]).status.code(), Some(2));
    assert_eq!(partcx(&["partitions", "--n", "3", "--format", "dot"]).status.code(), Some(2));
    assert_eq!(partcx(&["export", "tree", "--n", "3", "ab bc"]).status.code(), Some(2));
}

#[test]
fn deterministic_across_jobs() {
    let a = partcx(&["verify-theorem", "--n", "4", "--jobs", "1"]);
    let b = partcx(&["verify-theorem", "--n", "4", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = partcx(&["verify-labelled", "assoc", "--n", "3", "--jobs", "1"]);
    let b = partcx(&["verify-labelled", "assoc", "--n", "3", "--jobs", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn resume_reuses_stream() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("run.jsonl");
    let s = stream.to_str().unwrap();
    let full = partcx(&["verify-theorem", "--n", "4", "--stream", s]);
    let lines: Vec<String> = std::fs::read_to_string(&stream).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 25);
    std::fs::write(&stream, lines[..10].join("\n") + "\n").unwrap();
    let resumed = partcx(&["verify-theorem", "--n", "4", "--stream", s, "--resume"]);
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(full.stdout, resumed.stdout);
    assert_eq!(std::fs::read_to_string(&stream).unwrap().lines().count(), 25);
}

#[test]
fn enumerations_and_export() {
    let v = json(&partcx(&["trees", "--n", "4"]));
    assert_eq!(v["count"], 26);
    let v = json(&partcx(&["partitions", "--labels", "x,y,z,w"]));
    assert_eq!(v["count"], 13);
    let dot = partcx(&["export", "tree", "--n", "4", "ab cd", "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
    let t = json(&partcx(&["export", "tree", "--n", "3", "ab"]));
    assert_eq!(t["family"], serde_json::json!([["a", "b", "c"], ["a", "b"]]));
    let ch = partcx(&["export", "chain", "--n", "4", "(ab)(cd) < (a)(b)(cd)", "--format", "text"]);
    assert_eq!(String::from_utf8(ch.stdout).unwrap(), "[(ab)(cd), (a)(b)(cd)]\n");
}

#[test]
fn file_operad_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("assoc.op");
    std::fs::write(&path, partcx::operads::FiniteOperad::assoc(3).to_table()).unwrap();
    let spec = format!("file:{}", path.display());
    let out = partcx(&["bar-compare", &spec, "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["operad"], "assoc");
    // Arity 4 is out of the table's range.
    assert_eq!(partcx(&["bar-compare", &spec, "--n", "4"]).status.code(), Some(2));
}

#[test]
fn phi_and_zeta() {
    for cmd in ["verify-phi", "verify-zeta"] {
        let out = partcx(&[cmd, "--n", "4"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let v = json(&out);
        assert_eq!(v["consequence"]["equal"], true);
    }
}
