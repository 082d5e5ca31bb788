use std::process::{Command, Output};

use serde_json::Value;
use toprec::form::MultiForm;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toprec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn displays(omega: &Value) -> Vec<(String, String)> {
    omega["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["slots"].to_string(), t["display"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn omega_json_round_trips() {
    let v = json(&["compute", "--curve", "lambert", "--g", "1", "--n", "2"]);
    let form: MultiForm = serde_json::from_value(v["omega"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&form).unwrap(), v["omega"]);
    assert_eq!(form.n(), 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["compute", "--curve", "maps-quad", "--g", "0", "--n", "4", "--format", "csv"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn weil_petersson_one_point_and_probe() {
    let v = json(&["compute", "--curve", "weil-petersson", "--g", "1", "--n", "1", "--mode", "printed", "--probe", "3"]);
    let d = displays(&v["omega"]);
    assert_eq!(
        d,
        vec![
            (r#"[{"bp":0,"order":2}]"#.to_string(), "p/12".to_string()),
            (r#"[{"bp":0,"order":4}]"#.to_string(), "1/8".to_string()),
        ]
    );
    let values: Vec<&str> = v["probes"][0]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1/4", "1/8"]);
}

#[test]
fn free_energy_at_genus_two() {
    let v = json(&["compute", "--curve", "weil-petersson", "--g", "2", "--n", "0"]);
    assert_eq!(v["f_g"]["display"], "43*p^3/2160");
}

#[test]
fn curve_file_reproduces_catalog_curve() {
    let dir = std::env::temp_dir().join(format!("toprec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("lambert.json");
    std::fs::write(
        &path,
        r#"{"name": "w", "dx": {"num": ["1", "-1"], "den": ["0", "1"]},
            "y": {"num": ["0", "1"], "den": ["1"]}, "branchpoints": [{"a": "1"}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["compute", "--curve-file", p, "--g", "0", "--n", "3"]);
    let from_catalog = json(&["compute", "--curve", "lambert", "--g", "0", "--n", "3"]);
    assert_eq!(from_file["omega"], from_catalog["omega"]);
    assert_eq!(run(&["validate", "--curve-file", p]).status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["compute", "--curve", "nope", "--g", "0", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["compute", "--curve", "airy", "--g", "1", "--n", "0"]).status.code(), Some(1));
    assert_eq!(run(&["compute", "--curve", "airy", "--g", "0"]).status.code(), Some(1));
    assert_eq!(
        run(&["compute", "--curve", "airy", "--g", "0", "--n", "3", "--mode", "printed"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["compute", "--curve", "airy", "--g", "1", "--n", "1", "--window", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["compute", "--curve-file", "/nonexistent.json", "--g", "0", "--n", "3"]).status.code(), Some(1));
    // The maps ω₀,₃ coefficients have denominator 12p⁴ - 2p², which vanishes at p = 0.
    let pole = run(&["compute", "--curve", "maps-quad", "--g", "0", "--n", "3", "--probe", "0"]);
    assert_eq!(pole.status.code(), Some(1));
}

#[test]
fn rejected_curve_file_lists_diagnostics() {
    let dir = std::env::temp_dir().join(format!("toprec-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cusp.json");
    std::fs::write(
        &path,
        r#"{"name": "cusp", "x": {"num": ["0", "0", "0", "1"], "den": ["1"]},
            "y": {"num": ["0", "1"], "den": ["1"]}, "branchpoints": [{"a": "0"}]}"#,
    )
    .unwrap();
    let o = run(&["validate", "--curve-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["diagnostics"].as_array().unwrap().iter().any(|d| d["predicate"] == "simple"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn extraction_tables() {
    let o = run(&["extract", "--curve", "lambert", "--g", "0", "--n", "1", "--max-degree", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let hurwitz: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(hurwitz, ["1", "1", "3", "16", "125"]);

    let v = json(&["extract", "--curve", "maps-quad", "--g", "0", "--faces", "1,2,3"]);
    let counts: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["2", "9", "54"]);
}

#[test]
fn graph_suite_passes_and_catalog_lists_curves() {
    let o = run(&["check", "--suite", "graphs", "--format", "pretty"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("criterion 7: PASS"));
    let cat = json(&["catalog"]);
    let names: Vec<&str> = cat.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["airy", "weil-petersson", "lambert", "maps-quad"]);
}
