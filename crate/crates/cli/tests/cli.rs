use std::process::{Command, Output};

use serde_json::Value;

fn gce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gce"))
        .args(args)
        .env_remove("GCE_MAX_N")
        .output()
        .expect("run gce")
}

fn stdout(args: &[&str]) -> String {
    let out = gce(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    serde_json::from_str(&stdout(&all)).unwrap()
}

#[test]
fn k0_text_output() {
    assert_eq!(
        stdout(&["k0", "--inline", "1111/1011/1101/1110"]),
        "Z2+Z6, identity order 3\n"
    );
}

#[test]
fn json_schema() {
    let v = json(&["canon", "--inline", "011/100/100"]);
    assert_eq!(v["command"], "canon");
    assert_eq!(v["inputs"][0], serde_json::json!(["011", "100", "100"]));
    assert_eq!(v["result"]["matrix"], serde_json::json!(["001", "001", "110"]));
    assert!(v["stats"]["elapsed_ms"].is_u64());
    assert!(v["stats"]["visited"].is_u64());
}

#[test]
fn files_and_inline_inputs_combine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.01m");
    std::fs::write(&path, "# reverse transfer source\n0111\n1000\n1000\n1000\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["k0-pairs", p, "--inline", "0101/1010/1000/1000"]), "false\n");
    assert_eq!(
        stdout(&["reverse-transfers", p, "--p", "2", "--m", "1"]),
        "0101\n1010\n1000\n1000\n"
    );
}

#[test]
fn class_sizes_and_dump() {
    let c = "1100/0011/1110/1101";
    assert_eq!(stdout(&["class", "--inline", c]), "size 1464\nexhausted true\n");
    assert_eq!(stdout(&["class", "--no-perms", "--inline", c]), "size 244\nexhausted true\n");
    assert_eq!(
        stdout(&["class", "--no-perms", "--perms", "--inline", c]),
        "size 1464\nexhausted true\n"
    );
    let capped = json(&["class", "--max", "100", "--inline", c]);
    assert_eq!(capped["result"]["exhausted"], false);

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("members.txt");
    let a = "1111/1011/1101/1110";
    stdout(&["class", "--inline", a, "--dump", dump.to_str().unwrap()]);
    let text = std::fs::read_to_string(&dump).unwrap();
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 4);
    assert!(blocks.iter().any(|b| b.trim() == "1111\n1011\n1101\n1110"));
}

#[test]
fn threads_do_not_change_results() {
    let c = "1100/0011/1110/1101";
    let one = json(&["class", "--inline", c]);
    let four = json(&["class", "--threads", "4", "--inline", c]);
    assert_eq!(one["result"], four["result"]);
}

#[test]
fn equiv_verdicts() {
    let a = "111/101/100";
    let b = "011/111/010";
    let v = json(&["equiv", "--inline", a, "--inline", b]);
    assert_eq!(v["result"]["verdict"], "equivalent");
    let v = json(&["equiv", "--no-perms", "--inline", a, "--inline", b]);
    assert_eq!(v["result"]["verdict"], "not_equivalent");
    assert_eq!(v["result"]["class_size"], 3);
}

#[test]
fn transfer_commands() {
    let out = stdout(&["transfers", "--inline", "0111/1000/1000/1000"]);
    assert!(out.lines().count() > 0);
    assert_eq!(
        stdout(&["apply-transfer", "--inline", "11/01", "--p", "0", "--k", "0", "--m", "1"]),
        "11\n01\n"
    );
    let v = json(&["reverse-transfers", "--inline", "0111/1000/1000/1000"]);
    let moves = v["result"].as_array().unwrap();
    assert!(moves.contains(&serde_json::json!({"p": 2, "k": [], "m": [1]})));
}

#[test]
fn explosion_commands() {
    assert_eq!(
        stdout(&["complete-explode", "--inline", "111/000/100", "--v", "0"]),
        "11100\n00010\n00001\n00000\n11100\n"
    );
    assert_eq!(
        stdout(&["complete-explode", "--inline", "111/000/100", "--v", "0", "--steps", "1"]),
        "1110\n0001\n0000\n1100\n"
    );
    let exploded = stdout(&["explode", "--inline", "111/110/101", "--v", "0", "--m1", "1", "--m2", "0,2"]);
    assert_eq!(exploded.lines().count(), 4);
    let out = stdout(&[
        "is-explosion",
        "--inline",
        "111/110/101",
        "--inline",
        &exploded.trim().replace('\n', "/"),
    ]);
    assert!(out.starts_with("true\n"));
    assert_eq!(
        stdout(&["is-explosion", "--inline", "11/00", "--inline", "111/000/000"]),
        "false\n"
    );
    let rev = stdout(&["reverse-explode", "--inline", "111/110/101", "--v", "0", "--m1", "1", "--m2", "0,2"]);
    assert_eq!(rev.lines().count(), 4);
    let em = stdout(&["edge-matrix", "--inline", "110/001/100"]);
    assert!(em.starts_with("1100\n0010\n0001\n1100\n"));
}

#[test]
fn sse_commands() {
    assert_eq!(
        stdout(&[
            "esse-verify", "--inline", "11/01", "--inline", "110/001/001", "--inline", "110/001",
            "--inline", "10/01/01",
        ]),
        "true\ncolumn subdivision true\n"
    );
    assert_eq!(
        stdout(&["imprimitivity", "--inline", "110/001", "--inline", "10/01/01"]),
        "00110\n00001\n10000\n01000\n01000\n"
    );
    let v = json(&["esse-decide", "--inline", "11/01", "--inline", "110/001/001"]);
    assert!(v["result"]["r"].is_array());
    let sink = gce(&["esse-decide", "--inline", "11/00", "--inline", "111/000/000"]);
    assert_eq!(sink.status.code(), Some(1));
}

#[test]
fn graph_commands() {
    assert_eq!(stdout(&["irreducible", "--inline", "01/10"]), "true\n");
    assert_eq!(stdout(&["irreducible", "--inline", "11/00"]), "false\n");
    assert_eq!(stdout(&["cofinal", "--inline", "11/01"]), "0\n");
    assert_eq!(stdout(&["cofinal", "--inline", "11/11"]), "0 1\n");
    assert_eq!(stdout(&["cofinal", "--inline", "10/01", "--v", "0"]), "false\n");
    assert_eq!(stdout(&["transpose", "--inline", "10/11"]), "11\n01\n");
}

#[test]
fn search_small() {
    let v = json(&["search", "--n", "2"]);
    assert_eq!(v["result"]["complete"], true);
    assert_eq!(v["result"]["counterexample_pairs"], serde_json::json!([]));
    let out = stdout(&["search", "--n", "3", "--exclude-permutations"]);
    assert!(out.contains("counterexample pairs 0\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(gce(&["nosuch"]).status.code(), Some(2));
    assert_eq!(gce(&["canon"]).status.code(), Some(2));
    assert_eq!(gce(&["canon", "--threads", "0", "--inline", "1"]).status.code(), Some(2));
    assert_eq!(gce(&["explode", "--inline", "11/11", "--v", "0"]).status.code(), Some(2));
    assert_eq!(gce(&["canon", "--inline", "12/01"]).status.code(), Some(1));
    assert_eq!(gce(&["canon", "--inline", "11/0"]).status.code(), Some(1));
    assert_eq!(gce(&["canon", "/nonexistent/file.01m"]).status.code(), Some(1));
    assert_eq!(
        gce(&["explode", "--inline", "11/11", "--v", "0", "--m1", "0", "--m2", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(gce(&["--help"]).status.code(), Some(0));
}

#[test]
fn size_limit_env() {
    let big = vec!["1"; 17].join("");
    let big = vec![big.as_str(); 17].join("/");
    assert_eq!(gce(&["transpose", "--inline", &big]).status.code(), Some(1));
    let run = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_gce"))
            .args(["transpose", "--inline", &big])
            .env("GCE_MAX_N", n)
            .output()
            .unwrap()
    };
    assert_eq!(run("20").status.code(), Some(0));
    assert_eq!(run("3").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn five_vertex_pair_needs_relabelling() {
    let c = "00001/01010/01010/10001/00100";
    let b = "00010/01100/10001/01000/01000";
    let v = json(&["equiv", "--inline", c, "--inline", b]);
    assert_eq!(v["result"]["verdict"], "equivalent");
    assert_eq!(
        stdout(&["apply-transfer", "--inline", c, "--p", "2", "--m", "1"]),
        "00001\n01010\n01000\n10001\n00100\n"
    );
    let v = json(&["equiv", "--no-perms", "--inline", c, "--inline", b]);
    assert_eq!(v["result"]["verdict"], "not_equivalent");
    assert_eq!(v["result"]["class_size"], 183204);
}
