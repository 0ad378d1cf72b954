use std::path::{Path, PathBuf};
use std::process::Command;

use dyndeg::cli::{config_to_value, parse_config, serialize_config, Report};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dyndeg"))
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> (i32, String, String) {
    let out = bin().args(args).arg("--config").arg(config).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn p2_squaring() -> Value {
    json!({"model": {"kind": "projective", "n": 2}, "map": {"kind": "power", "d": 2}, "M": 8})
}

fn custom_p2(top_block: i64) -> Value {
    json!({
        "model": {
            "kind": "custom", "top_degree": 4, "dims": [1, 0, 1, 0, 1],
            "products": [{"a": [2, 0], "b": [2, 0], "coords": [1]}],
            "integrate": [1], "h": [1]
        },
        "map": {"kind": "matrices", "blocks": [[[1]], [], [[2]], [], [[top_block]]]},
        "analyses": ["chain", "gromov"]
    })
}

#[test]
fn p2_report_has_every_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p2.json", &p2_squaring());
    let (code, stdout, stderr) = run(&["report"], &cfg);
    assert_eq!(code, 0, "{stderr}");
    let report = Report::from_json(&stdout).unwrap();
    let chain = report.chain.unwrap();
    assert!((chain.lambda_gr.rho - 4.0).abs() < 1e-9);
    assert!(chain.equality_holds && chain.chain_holds && chain.equality_asserted);
    assert_eq!(report.gromov.unwrap().dim, 3);
    let delta = report.delta_table.unwrap();
    assert_eq!(delta.rows.len(), 3);
    let graph = report.graph_class.unwrap();
    assert_eq!(graph.len(), 8);
    assert!(graph.iter().all(|g| g.consistent));
    let bounds = report.bounds.unwrap();
    assert!(bounds.violations == 0 && !bounds.pairs.is_empty());
    assert!(report.timing.is_none());
}

#[test]
fn abelian_identity_gives_ones() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({"model": {"kind": "abelian", "g": 1}, "map": {"kind": "identity"}, "analyses": ["chain"]});
    let (code, stdout, stderr) = run(&["report"], &write_config(dir.path(), "e.json", &v));
    assert_eq!(code, 0, "{stderr}");
    let chain = Report::from_json(&stdout).unwrap().chain.unwrap();
    assert_eq!(chain.lambda_gr.rho, 1.0);
    assert!(chain.mu.iter().all(|m| m.radius.rho == 1.0));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({
        "model": {"kind": "multiprojective", "n": [1, 1]},
        "map": {"kind": "product", "d": [2, 3], "perm": [1, 0]},
        "M": 6
    });
    let cfg = write_config(dir.path(), "swap.json", &v);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let st = bin().arg("report").arg("--config").arg(&cfg).arg("--out").arg(out).status().unwrap();
        assert_eq!(st.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn missing_model_reports_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({"map": {"kind": "identity"}, "extra": 1});
    let (code, stdout, stderr) = run(&["report"], &write_config(dir.path(), "bad.json", &v));
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    let err: Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(err["error"], "validation");
    let pointers: Vec<&str> = err["violations"].as_array().unwrap().iter().map(|v| v["pointer"].as_str().unwrap()).collect();
    assert!(pointers.contains(&"/model"), "{pointers:?}");
    assert!(pointers.contains(&"/extra"), "{pointers:?}");
}

#[test]
fn unknown_model_kind() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({"model": {"kind": "grassmannian", "k": 2}, "map": {"kind": "identity"}});
    let (code, _, stderr) = run(&["validate"], &write_config(dir.path(), "k.json", &v));
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&stderr).unwrap();
    assert!(err["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v["kind"] == "unknown_model_kind" && v["pointer"] == "/model/kind"));
}

#[test]
fn bad_matrix_shape() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({"model": {"kind": "abelian", "g": 1}, "map": {"kind": "h1", "matrix": [[1, 1, 0], [1, 0, 0]]}});
    let (code, _, stderr) = run(&["validate"], &write_config(dir.path(), "s.json", &v));
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&stderr).unwrap();
    assert!(err["violations"].as_array().unwrap().iter().any(|v| v["kind"] == "bad_matrix_shape"));
}

#[test]
fn custom_map_failing_multiplicativity_names_the_pair() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&["report"], &write_config(dir.path(), "bad.json", &custom_p2(5)));
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(err["violations"][0]["basis_pair"], json!(["e[2:0]", "e[2:0]"]));

    let (code, stdout, stderr) = run(&["report"], &write_config(dir.path(), "good.json", &custom_p2(4)));
    assert_eq!(code, 0, "{stderr}");
    let chain = Report::from_json(&stdout).unwrap().chain.unwrap();
    assert!((chain.lambda_gr.rho - 4.0).abs() < 1e-9);
    // custom maps carry no realizability claim
    assert!(!chain.equality_asserted);
}

#[test]
fn unreadable_config_and_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["report"], &dir.path().join("missing.json"));
    assert_eq!(code, 2);

    let cfg = write_config(dir.path(), "p2.json", &p2_squaring());
    let out = bin()
        .arg("report")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("no/such/dir/out.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_and_delta_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p2.json", &p2_squaring());
    let (code, stdout, _) = run(&["validate"], &cfg);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["model"]["deg_x"], json!({"num": "1", "den": "1"}));

    let (code, stdout, _) = run(&["delta", "--max-power", "4"], &cfg);
    assert_eq!(code, 0);
    let r = Report::from_json(&stdout).unwrap();
    assert!(r.chain.is_none() && r.gromov.is_none());
    let d = r.delta_table.unwrap();
    let row1: Vec<&str> = d.rows[1].iter().map(|q| q.num.as_str()).collect();
    assert_eq!(row1, ["2", "4", "8", "16"]);
}

#[test]
fn out_file_and_output_key() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_key.json");
    let mut v = p2_squaring();
    v["output"] = json!(target.to_str().unwrap());
    v["analyses"] = json!(["gromov"]);
    let (code, stdout, _) = run(&["report"], &write_config(dir.path(), "k.json", &v));
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r = Report::from_json(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(r.gromov.unwrap().degree_profile, vec![1, 0, 1, 0, 1]);
}

#[test]
fn timing_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p2.json", &p2_squaring());
    let (_, stdout, _) = run(&["report", "--timing"], &cfg);
    assert!(Report::from_json(&stdout).unwrap().timing.is_some());
}

#[test]
fn config_round_trip() {
    let configs = [
        p2_squaring(),
        custom_p2(4),
        json!({"model": {"kind": "surface_lattice", "gram": [[1, 0], [0, -2]], "ample": [1, 0]},
               "map": {"kind": "isometry", "matrix": [[3, 4], [2, 3]]}, "tol": 1e-8}),
        json!({"model": {"kind": "abelian", "g": 2, "polarization": ["1/2", 1, 1, 1, 1, 1]},
               "map": {"kind": "h1", "matrix": [[1, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 1], [0, 0, 1, 0]], "realizable": true}}),
    ];
    for v in configs {
        let cfg = parse_config(&v.to_string()).unwrap();
        let text = serialize_config(&cfg);
        let again = parse_config(&text).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(config_to_value(&again), serde_json::from_str::<Value>(&text).unwrap());
    }
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p2.json", &p2_squaring());
    let (_, stdout, _) = run(&["report"], &cfg);
    let report = Report::from_json(&stdout).unwrap();
    assert_eq!(report.to_json() + "\n", stdout);
}
