use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const SCHEMA: &str = include_str!("../schema/run_report.schema.json");

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_submodlab"));
    c.env("SUBMODLAB_THREADS", "2");
    c
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn valid(report: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let msgs: Vec<String> = match compiled.validate(report) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("report does not match schema: {msgs:?}\n{report:#}");
}

fn without_time(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

const TRIANGLE: &str = r#"{
  "oracle": {"kind": "graph_cut", "n": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]]},
  "modular": {"weights": [1.5, 0.0, 0.0], "sign": "minus"}
}"#;

#[test]
fn sfm_on_triangle_minus_modular() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tri.json", TRIANGLE);
    let (code, out, _) = run(&["sfm", &path]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    valid(&v);
    assert_eq!(v["outcome"]["details"]["min_value"], -1.5);
    assert_eq!(v["outcome"]["solution"], serde_json::json!([0, 1, 2]));
}

#[test]
fn bound_command_prints_both_numbers() {
    let (code, out, _) = run(&["verify", "bound", "--m", "100", "--q", "0.5", "--eps", "0.2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    valid(&v);
    let r = &v["report"];
    assert_eq!(r["holds"], true);
    assert_eq!(r["target"], 60);
    assert!((r["exact_probability"].as_f64().unwrap() - 0.0108438667116).abs() < 1e-12);
    assert!(r["closed_form_bound"].as_f64().unwrap() > 9.0e-7);
}

#[test]
fn infeasible_sparsest_cut_exits_with_two() {
    let dir = TempDir::new().unwrap();
    // far below the optimum 1/14 divided by the approximation factor
    let path = write(&dir, "f1.json", r#"{"oracle": {"kind": "f1f2", "n": 8, "beta": 3, "member": "first"}, "b": 0.0001}"#);
    let (code, out, _) = run(&["ssc", "decide", &path, "--budget", "50"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    valid(&v);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["outcome"]["fail_reason"], "budget_exhausted");
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.json", r#"{"oracle": {"kind": "graph_cut", "n": 3, "edges": [[0, 1, "heavy"]]}}"#);
    let (code, out, err) = run(&["sfm", &path]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("oracle") && err.contains("edges[0][2]"), "{err}");
    let (code, _, err) = run(&["sfm", "/nonexistent/instance.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("reading"), "{err}");
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "sml.json",
        r#"{"oracle": {"kind": "f3f4", "n": 12, "alpha": 6, "beta": 2, "member": "second", "seed": 4},
            "problem": {"type": "sml", "target_weight": 4}, "b": 2.05}"#,
    );
    let args = ["sml", &path, "--seed", "17", "--trials", "4"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!(c1, c2);
    assert_eq!(without_time(&a), without_time(&b));
    let v: Value = serde_json::from_str(&a).unwrap();
    valid(&v);
    assert_eq!(v["runs"].as_array().unwrap().len(), 4);
}

#[test]
fn every_command_emits_a_schema_valid_report() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.json", TRIANGLE);
    let cycle = write(
        &dir,
        "cycle.json",
        r#"{"oracle": {"kind": "graph_cut", "n": 4, "edges": [[0,1,1.0],[1,2,1.0],[2,3,1.0],[3,0,1.0]]},
            "problem": {"type": "sbc", "b_prime": 0.5}, "b": 1.0}"#,
    );
    let sym = write(
        &dir,
        "sym.json",
        r#"{"oracle": {"kind": "f1f2", "n": 12, "beta": 4, "member": "first"}, "problem": {"type": "sbc", "b_prime": 0.3333}}"#,
    );
    let slb = write(
        &dir,
        "slb.json",
        r#"{"oracle": {"kind": "coverage", "item_weights": [1, 2, 1, 3], "covers": [[0], [1, 2], [3], [0, 3], [2], [1]]},
            "problem": {"type": "slb", "m": 2}, "b": 4.0}"#,
    );
    let two_p = write(
        &dir,
        "two_p.json",
        r#"{"oracle": {"kind": "two_partition", "n": 4, "hidden": [0, 1],
            "grid": [[0, 1, 2], [1, 2, 3], [2, 3, 3]]}}"#,
    );
    let ssc = write(
        &dir,
        "ssc.json",
        r#"{"oracle": {"kind": "graph_cut", "n": 4, "edges": [[0,1,2.0],[2,3,2.0],[1,2,0.5]]},
            "problem": {"type": "ssc", "pairs": [[0, 3, 1.0], [1, 2, 1.0]]}, "b": 1.0}"#,
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["sfm", &tri],
        vec!["ssc", "decide", &ssc],
        vec!["ssc", "approx", &ssc],
        vec!["sbc", "gen", &cycle],
        vec!["sbc", "sym", &sym],
        vec!["slb", "simple", &slb],
        vec!["slb", "sampled", &slb],
        vec!["slb", "auto", &slb],
        vec!["approx-everywhere", &two_p, "--samples", "30"],
        vec!["verify", "structure", &tri],
        vec!["verify", "structure", &slb, "--sampled", "50"],
        vec!["verify", "distinguish", "--pair", "f3f4", "--n", "40", "--alpha", "8", "--beta", "3", "--queries", "100", "--trials", "5"],
        vec!["verify", "gap", "--pair", "f3f4", "--n", "12", "--alpha", "6", "--beta", "2", "--problem", "sml", "--target-weight", "6"],
        vec!["verify", "brute", &ssc],
        vec!["verify", "brute", &slb],
    ];
    for args in cases {
        let (code, out, err) = run(&args);
        assert!(code == 0 || code == 2, "{args:?}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
        valid(&v);
    }
}

#[test]
fn hidden_structure_is_redacted_by_default() {
    let args = ["verify", "gap", "--pair", "f5f6", "--n", "12", "--m", "3", "--beta", "2", "--problem", "slb"];
    let (_, out, _) = run(&args);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["second"]["hidden_witness"], "redacted");
    assert_eq!(v["report"]["ratio"], 2.0);
    let mut revealed = args.to_vec();
    revealed.push("--reveal-hidden");
    let (_, out, _) = run(&revealed);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["second"]["hidden_witness"]["kind"], "partition");
}

#[test]
fn csv_output_is_one_header_and_one_row() {
    let (code, out, _) = run(&["verify", "bound", "--m", "10", "--q", "0.3", "--eps", "0.5", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let holds = headers.iter().position(|h| h == "report.holds").unwrap();
    assert_eq!(&rows[0][holds], "true");
}

#[test]
fn schema_file_is_shipped() {
    assert!(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_report.schema.json").exists());
}
