use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn duality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn keyed(out: &Output) -> HashMap<String, String> {
    stdout(out)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(map: &HashMap<String, String>, key: &str) -> f64 {
    map.get(key)
        .unwrap_or_else(|| panic!("missing {key} in {map:?}"))
        .parse()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn coplanar_json(theta: f64) -> String {
    format!(
        r#"{{
  "n_beams": 3,
  "populations": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
  "detector": {{ "bloch_vectors": [[0, 0, 1], [{s}, 0, {c}], [{ns}, 0, {c}]] }}
}}"#,
        s = theta.sin(),
        ns = -theta.sin(),
        c = theta.cos()
    )
}

#[test]
fn sweep_writes_csv_svg_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let out = duality(&[
        "sweep",
        "--steps",
        "33",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(keyed(&out)["rows"], "33");

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,V,D,D2V2,branch,beta_opt,gamma_opt");
    assert_eq!(lines.len(), 34);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let v: f64 = f[1].parse().unwrap();
        let d: f64 = f[2].parse().unwrap();
        let s: f64 = f[3].parse().unwrap();
        assert!((d * d + v * v - s).abs() < 1e-15);
    }
    let last: Vec<&str> = lines[33].split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), PI);

    let doc_text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&doc_text).unwrap();
    let polylines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
    assert_eq!(polylines, 3);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn four_step_sweep_hits_the_crossover() {
    let out = duality(&["sweep", "--min", "0", "--max", "pi", "--steps", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
    assert!((row[0].parse::<f64>().unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
    assert!((row[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert!((row[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(row[4], "crossover");
}

#[test]
fn sweep_is_deterministic() {
    let a = duality(&["sweep", "--steps", "65"]);
    let b = duality(&["sweep", "--steps", "65"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_validation_reports_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = duality(&["sweep", "--steps", "17", "--validate", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(num(&keyed(&out), "max_closed_numeric_deviation") < 1e-8);
}

#[test]
fn sweep_rejects_bad_ranges_and_paths() {
    assert_eq!(duality(&["sweep", "--min", "2", "--max", "1"]).status.code(), Some(2));
    assert_eq!(duality(&["sweep", "--max", "4"]).status.code(), Some(2));
    assert_eq!(duality(&["sweep", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(duality(&["sweep", "--max", "banana"]).status.code(), Some(2));
    let out = duality(&["sweep", "--csv", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot write"));
}

#[test]
fn eval_coplanar_quarter_turn() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "c.json", &coplanar_json(PI / 2.0));
    let out = duality(&["eval", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = keyed(&out);
    let third = 1.0 / 3f64.sqrt();
    assert!((num(&m, "V") - third).abs() < 1e-9);
    assert!((num(&m, "D") - third).abs() < 1e-8);
    assert!(num(&m, "P").abs() < 1e-9);
}

#[test]
fn eval_with_measurement_reports_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
  "n_beams": 3,
  "populations": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
  "detector": { "bloch_vectors": [[0, 0, 1], [1, 0, 0], [-1, 0, 0]] },
  "measurement": { "beta": "pi/2", "gamma": 0 }
}"#;
    let path = write_config(dir.path(), "m.json", body);
    let out = duality(&["eval", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = keyed(&out);
    assert!((num(&m, "K") - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    assert!((num(&m, "p_+") - 0.5).abs() < 1e-12);
}

#[test]
fn eval_identical_states() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
  "n_beams": 3,
  "populations": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333],
  "detector": { "bloch_vectors": [[0, 0, 1], [0, 0, 1], [0, 0, 1]] }
}"#;
    let path = write_config(dir.path(), "same.json", body);
    let m = keyed(&duality(&["eval", &path]));
    assert!((num(&m, "V") - 1.0).abs() < 1e-12);
    assert_eq!(num(&m, "D"), 0.0);
}

#[test]
fn eval_reports_invalid_populations_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let body = "{\n  \"n_beams\": 2,\n  \"populations\": [0.7, 0.7],\n  \"detector\": { \"bloch_vectors\": [[0,0,1],[1,0,0]] }\n}";
    let path = write_config(dir.path(), "bad.json", body);
    let out = duality(&["eval", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn eval_missing_file_is_usage_error() {
    assert_eq!(duality(&["eval", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn optimize_picks_branches() {
    let dir = tempfile::tempdir().unwrap();
    let above = write_config(dir.path(), "a.json", &coplanar_json(5.0 * PI / 6.0));
    let m = keyed(&duality(&["optimize", &above]));
    let beta = num(&m, "beta");
    assert!(beta.min(PI - beta) < 1e-4, "β={beta}");
    assert_eq!(m["closed_branch"], "sigma_z");
    assert_eq!(m["branch_match"], "true");

    let below = write_config(dir.path(), "b.json", &coplanar_json(PI / 3.0));
    let m = keyed(&duality(&["optimize", &below]));
    assert!((num(&m, "beta") - PI / 2.0).abs() < 1e-4);
    let gamma = num(&m, "gamma");
    assert!(gamma.abs() < 1e-4 || (gamma - PI).abs() < 1e-4, "γ={gamma}");
    assert_eq!(m["closed_branch"], "sigma_x");
    assert_eq!(m["branch_match"], "true");
}

#[test]
fn optimize_rejects_qutrit_detectors() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
  "n_beams": 2,
  "populations": [0.5, 0.5],
  "detector": { "amplitudes": [[[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]]] }
}"#;
    let path = write_config(dir.path(), "q.json", body);
    let out = duality(&["optimize", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dimension 3"));
}

#[test]
fn check_reports_every_property() {
    let out = duality(&["check", "--seed", "1", "--trials", "5"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    let props: Vec<&str> = text.lines().filter(|l| l.starts_with("property=")).collect();
    assert_eq!(props.len(), 12);
    assert!(props.iter().all(|l| l.contains("trials=5 passed=5 status=pass")));
    assert!(text.contains("summary=12/12 properties passed"));
}

#[test]
fn check_rejects_zero_trials() {
    assert_eq!(duality(&["check", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn help_and_unknown_commands() {
    assert!(duality(&["--help"]).status.success());
    assert_eq!(duality(&["frobnicate"]).status.code(), Some(2));
}
