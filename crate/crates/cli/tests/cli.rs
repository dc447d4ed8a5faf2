//! End-to-end tests driving the compiled binary the way a shell user would.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stcluster"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should launch")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed.\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_value(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Two triangles joined by one weak edge, repeated over two slices.
const TWO_BLOCKS: &str = r#"{
  "N": 6, "T": 2,
  "layers": [
    {"t": 1, "edges": [[1,2,1.0],[2,3,1.0],[1,3,1.0],[4,5,1.0],[5,6,1.0],[4,6,1.0],[3,4,0.1]]},
    {"t": 2, "edges": [[1,2,1.0],[2,3,1.0],[1,3,1.0],[4,5,1.0],[5,6,1.0],[4,6,1.0],[3,4,0.1]]}
  ],
  "temporal": "chain"
}"#;

fn write_two_blocks(dir: &Path) -> PathBuf {
    let path = dir.join("net.json");
    std::fs::write(&path, TWO_BLOCKS).unwrap();
    path
}

#[test]
fn generate_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = |net: &str, truth: &str| {
        vec![
            "generate".to_string(),
            "--alpha".into(),
            "0,1".into(),
            "--s".into(),
            "1,4".into(),
            "--N".into(),
            "10".into(),
            "--T".into(),
            "4".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            net.into(),
            "--truth".into(),
            truth.into(),
        ]
    };
    for (net, truth) in [("a.json", "at.json"), ("b.json", "bt.json")] {
        let argv = args(net, truth);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert_ok(&run_in(dir.path(), &argv));
    }
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.path().join("at.json")).unwrap(),
        std::fs::read(dir.path().join("bt.json")).unwrap()
    );
    let truth = read_value(&dir.path().join("at.json"));
    assert_eq!(truth["state_slices"], serde_json::json!([1, 4]));
    assert_eq!(truth["packing"]["K"], 1);
    assert_eq!(truth["memberships"].as_array().unwrap().len(), 4);
}

#[test]
fn cluster_recovers_the_two_blocks_and_writes_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    write_two_blocks(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "cluster", "--input", "net.json", "--a", "auto", "--R", "auto", "--out", "run.json",
        ],
    );
    assert_ok(&out);
    let run = read_value(&dir.path().join("run.json"));
    assert_eq!(run["R"], 1);
    assert_eq!(run["packing"]["K"], 2);
    assert!(run["a"].as_f64().unwrap() > 0.0);
    // the two triangles, tiled over both slices
    let elements = run["packing"]["elements"].as_array().unwrap();
    let mut supports: Vec<Vec<(u64, u64)>> = elements
        .iter()
        .map(|el| {
            el.as_array()
                .unwrap()
                .iter()
                .map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap()))
                .collect()
        })
        .collect();
    supports.sort();
    let tile = |xs: [u64; 3]| -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = (1..=2).flat_map(|t| xs.iter().map(move |&x| (t, x))).collect();
        v.sort();
        v
    };
    assert_eq!(supports, vec![tile([1, 2, 3]), tile([4, 5, 6])]);
    assert!(dir.path().join("run.norms.csv").is_file());
    let packing = read_value(&dir.path().join("run.packing.json"));
    assert_eq!(packing["K"], 2);
    assert!(run["provenance"]["inputs"]["network"]["digest"]
        .as_str()
        .unwrap()
        .starts_with("fnv1a64:"));
}

#[test]
fn eigs_labels_vectors_and_writes_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    write_two_blocks(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "eigs", "--input", "net.json", "--k", "4", "--a", "1", "--out", "eigs.json",
            "--heatmap", "hm",
        ],
    );
    assert_ok(&out);
    let eigs = read_value(&dir.path().join("eigs.json"));
    assert_eq!(eigs["a"], 1.0);
    let values = eigs["values"].as_array().unwrap();
    assert_eq!(values.len(), 4);
    assert!(values[0].as_f64().unwrap().abs() < 1e-9);
    let labels: Vec<&str> = eigs["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_str().unwrap())
        .collect();
    assert!(labels.contains(&"spatial"));
    assert!(labels.contains(&"temporal"));
    for i in 1..=4 {
        let hm = std::fs::read_to_string(dir.path().join(format!("hm-eig{i}.csv"))).unwrap();
        assert!(hm.starts_with("t,x,value\n"));
        assert_eq!(hm.lines().count(), 1 + 12);
    }
}

#[test]
fn build_exports_the_matrix_with_a_meta_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    write_two_blocks(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "build", "--input", "net.json", "--kind", "laplacian", "--a", "2", "--out",
            "lap.csv",
        ],
    );
    assert_ok(&out);
    let csv = std::fs::read_to_string(dir.path().join("lap.csv")).unwrap();
    assert!(csv.starts_with("row,col,value\n"));
    let meta = read_value(&dir.path().join("lap.meta.json"));
    assert_eq!(meta["kind"], "laplacian");
    assert_eq!(meta["a"], 2.0);
    assert_eq!(meta["dim"], 12);
    // a=0 temporal coupling hits only the diagonal; the dynamic Laplacian drops it entirely
    let out = run_in(
        dir.path(),
        &[
            "build", "--input", "net.json", "--kind", "dynamic-laplacian", "--out", "dyn.csv",
        ],
    );
    assert_ok(&out);
    let meta = read_value(&dir.path().join("dyn.meta.json"));
    assert_eq!(meta["a"], Value::Null);
    assert_eq!(meta["dim"], 6);
}

#[test]
fn cheeger_scores_match_direct_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    write_two_blocks(dir.path());
    std::fs::write(
        dir.path().join("p.json"),
        r#"{"K": 2, "T": 2, "elements": [
            [[1,1],[1,2],[1,3],[2,1],[2,2],[2,3]],
            [[1,4],[1,5],[1,6],[2,4],[2,5],[2,6]]
        ], "omega": []}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "cheeger", "--packing", "p.json", "--net", "net.json", "--a", "1.5", "--out",
            "scores.json",
        ],
    );
    assert_ok(&out);
    let scores = read_value(&dir.path().join("scores.json"));

    let net = stcluster::io::read_network(dir.path().join("net.json")).unwrap();
    let map = net.multiplex_index_map().unwrap();
    let packing = stcluster::io::read_packing(dir.path().join("p.json"), &map).unwrap();
    let w = stcluster::graph::build_multiplex_adjacency(&net, 1.5).unwrap();
    let want = stcluster::cheeger::element_ratios(&packing, &w, false, false).unwrap();
    let got: Vec<f64> = scores["element_ratios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(got, want);
    assert_eq!(
        scores["score"].as_f64().unwrap(),
        stcluster::cheeger::packing_score(&packing, &w, false, false).unwrap()
    );
}

#[test]
fn match_links_two_consistent_slices() {
    let dir = tempfile::tempdir().unwrap();
    write_two_blocks(dir.path());
    let part = r#"{"clusters": [[1,2,3],[4,5,6]]}"#;
    std::fs::write(dir.path().join("p1.json"), part).unwrap();
    std::fs::write(dir.path().join("p2.json"), part).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "match",
            "--partitions",
            "p1.json",
            "p2.json",
            "--net",
            "net.json",
            "--a",
            "1",
            "--out",
            "matched.json",
        ],
    );
    assert_ok(&out);
    let matched = read_value(&dir.path().join("matched.json"));
    assert_eq!(matched["K"], 2);
    assert_eq!(matched["slice_labels"], serde_json::json!([[1, 2], [1, 2]]));
}

#[test]
fn votes_builds_the_agreement_network_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("votes.csv"),
        "t,bill,voter,state,party,vote\n\
         1,b1,101,AA,p,y\n1,b1,102,AA,q,y\n1,b1,201,BB,p,n\n\
         1,b2,101,AA,p,y\n1,b2,102,AA,q,n\n1,b2,201,BB,p,y\n\
         2,b3,101,AA,p,y\n2,b3,102,AA,q,y\n2,b3,201,BB,p,n\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "votes", "--csv", "votes.csv", "--mode", "senators", "--out", "vnet.json",
        ],
    );
    assert_ok(&out);
    let net = read_value(&dir.path().join("vnet.json"));
    assert_eq!(net["N"], 3);
    assert_eq!(net["T"], 2);
    assert_eq!(net["slice_keys"], serde_json::json!([1, 2]));
    // voters 101 and 102 agree on one of their two shared bills in slice 1
    assert_eq!(
        net["layers"][0]["edges"],
        serde_json::json!([[1, 2, 0.5], [1, 3, 0.5]])
    );
    let labels = std::fs::read_to_string(dir.path().join("vnet.labels.csv")).unwrap();
    assert_eq!(
        labels,
        "vertex,id,state,party\n1,101,AA,p\n2,102,AA,q\n3,201,BB,p\n"
    );
}

#[test]
fn transitions_classify_an_element_emerging_from_the_remainder() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("p.json"),
        r#"{"K": 1, "T": 2, "elements": [
            [[2,1],[2,2],[2,3]]
        ], "omega": [[1,1],[1,2],[1,3],[1,4],[2,4]]}"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["transitions", "--packing", "p.json"]);
    assert_ok(&out);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["count"], 1);
    let event = &doc["events"][0];
    assert_eq!(event["t"], 1);
    assert_eq!(event["kind"], "appearance");
    assert_eq!(event["actor"], "omega");
    assert_eq!(event["J"], 2);
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run_in(
        dir.path(),
        &["cluster", "--input", "missing.json", "--out", "x.json"],
    );
    assert_eq!(missing.status.code(), Some(2));

    std::fs::write(dir.path().join("bad.json"), "not json").unwrap();
    let malformed = run_in(
        dir.path(),
        &["cluster", "--input", "bad.json", "--out", "x.json"],
    );
    assert_eq!(malformed.status.code(), Some(2));

    let unknown = run_in(dir.path(), &["cluster", "--no-such-flag"]);
    assert_eq!(unknown.status.code(), Some(2));

    write_two_blocks(dir.path());
    let bad_a = run_in(
        dir.path(),
        &[
            "cluster", "--input", "net.json", "--a", "sideways", "--out", "x.json",
        ],
    );
    assert_eq!(bad_a.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_a.stderr).contains("--a"));
}

#[test]
fn config_file_and_seed_flag_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), "seed = 11\n").unwrap();
    let base = [
        "generate", "--alpha", "0,1", "--s", "1,3", "--N", "8", "--T", "3",
    ];
    let mut from_file = base.to_vec();
    from_file.extend(["--config", "cfg.toml", "--out", "a.json"]);
    assert_ok(&run_in(dir.path(), &from_file));
    let mut from_flag = base.to_vec();
    from_flag.extend(["--seed", "11", "--out", "b.json"]);
    assert_ok(&run_in(dir.path(), &from_flag));
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap()
    );

    std::fs::write(dir.path().join("bad.toml"), "no_such_knob = 1\n").unwrap();
    let mut bad = base.to_vec();
    bad.extend(["--config", "bad.toml", "--out", "c.json"]);
    let out = run_in(dir.path(), &bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_knob"));
}
