use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pickdrop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pickdrop")).args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn generate_planted(dir: &Path) -> String {
    let path = dir.join("planted.bin").to_str().unwrap().to_owned();
    let out = pickdrop(&[
        "generate", "--n", "256", "--m", "4096", "--heavy-frequency", "2000", "--placement", "random", "--seed", "3",
        "--out", &path,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn missing_input_exits_3() {
    let out = pickdrop(&["heavy", "--input", "/definitely/not/here.bin"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(pickdrop(&["heavy", "--input", "x", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn out_of_range_item_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.bin");
    let mut bytes = b"PDSK".to_vec();
    bytes.extend(1u32.to_le_bytes());
    bytes.extend(4u64.to_le_bytes());
    for v in [1u32, 2, 9] {
        bytes.extend(v.to_le_bytes());
    }
    std::fs::write(&path, bytes).unwrap();
    let out = pickdrop(&["heavy", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_guard_exits_5() {
    let row = (1..=8).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let matrix = vec![row; 7].join(";");
    assert_eq!(pickdrop(&["verify", "oracle", "--matrix", &matrix]).status.code(), Some(5));
}

#[test]
fn pairs_check_finds_no_counterexample() {
    let out = pickdrop(&["verify", "pairs", "--max-len", "4", "--max-entry", "3", "--json"]);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["counterexamples"], 0);
    assert!(v["report"]["cases"].as_u64().unwrap() > 0);
}

#[test]
fn oracle_reports_the_all_ones_law() {
    let v = json(&pickdrop(&["verify", "oracle", "--matrix", "1,1;1,1", "--json"]));
    assert_eq!(v["tuples"], 4);
    assert_eq!(v["count_law"]["4"], 0.5);
    assert_eq!(v["count_law"]["2"], 0.25);
}

#[test]
fn heavy_report_carries_soundness() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_planted(dir.path());
    for mode in [&["--length", "4096"][..], &["--doubling"][..]] {
        let mut args = vec!["heavy", "--input", &path, "--seed", "9", "--json"];
        args.extend_from_slice(mode);
        let v = json(&pickdrop(&args));
        assert_eq!(v["element"], 1);
        let s = &v["soundness"];
        assert_eq!(s["true_frequency"], 2000);
        assert_eq!(s["holds"], true);
        assert!(v["estimate"].as_u64().unwrap() <= 2000);
        assert_eq!(v["params"].as_array().unwrap().len(), v["repetitions"].as_array().unwrap().len());
    }
}

#[test]
fn json_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_planted(dir.path());
    for args in [
        vec!["heavy", "--input", &path, "--seed", "4", "--json"],
        vec!["fk", "--input", &path, "--seed", "4", "--trials", "3", "--json"],
        vec!["verify", "promise", "--trials", "200", "--seed", "4", "--json"],
    ] {
        let a = pickdrop(&args);
        let b = pickdrop(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn sidecar_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_planted(dir.path());
    let sidecar: pickdrop::generator::Sidecar =
        serde_json::from_str(&std::fs::read_to_string(format!("{path}.stats.json")).unwrap()).unwrap();
    let stream = pickdrop::stream_model::format::read_stream_file(Path::new(&path)).unwrap();
    let recomputed = pickdrop::generator::Sidecar::from_stats(&pickdrop::ExactStats::from_stream(&stream));
    assert_eq!(sidecar, recomputed);
    assert_eq!(sidecar.heavy[&3], Some(true));
}

#[test]
fn text_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "3\n1\n3\n\n3\n2\n").unwrap();
    let v = json(&pickdrop(&["heavy", "--input", path.to_str().unwrap(), "--universe", "8", "--json"]));
    assert_eq!(v["element"], 3);
    assert_eq!(v["estimate"], 3);
}
