use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monogenic::fixtures::axis_ln_norm;
use monogenic::io;
use monogenic::{MonogenicSeries, MultiIndex, OperatorSymbol, Rational};
use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogenic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, io::to_json_text(v)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn canonical(v: &Value) -> String {
    let f: MonogenicSeries<Rational> = io::series_from_json(v).unwrap();
    io::to_json_text(&io::series_to_json(&f))
}

fn unit_json(mode: &str) -> Value {
    let one = if mode == "exact" { json!("1") } else { json!(1.0) };
    json!({"n": 2, "degree": 3, "mode": mode, "coeffs": [{"m": [0, 0], "value": {"": one}}]})
}

#[test]
fn eval_unit_and_linear() {
    let dir = TempDir::new().unwrap();
    let unit = write(dir.path(), "unit.json", &unit_json("exact"));
    let o = run(&["eval", s(&unit), "--point", "3,1/2,-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(io::parse_json(&stdout(&o)).unwrap(), json!({"": "1"}));

    let lin = write(
        dir.path(),
        "lin.json",
        &json!({"n": 2, "degree": 1, "mode": "exact", "coeffs": [{"m": [1, 0], "value": {"": "1"}}]}),
    );
    let o = run(&["eval", s(&lin), "--point", "0,2,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(io::parse_json(&stdout(&o)).unwrap(), json!({"": "2"}));
}

#[test]
fn malformed_input_reports_position() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\"n\": 2,\n  \"degree\": }\n").unwrap();
    let o = run(&["eval", s(&p), "--point", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn ckprod_with_unit_and_mode_checks() {
    let dir = TempDir::new().unwrap();
    let unit = write(dir.path(), "unit.json", &unit_json("exact"));
    let f = json!({"n": 2, "degree": 3, "mode": "exact", "coeffs": [
        {"m": [1, 0], "value": {"": "1/2", "12": "-2"}},
        {"m": [0, 2], "value": {"1": "3"}}
    ]});
    let fp = write(dir.path(), "f.json", &f);
    let o = run(&["ckprod", s(&unit), s(&fp)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), canonical(&f));

    let float_unit = write(dir.path(), "funit.json", &unit_json("float"));
    let o = run(&["ckprod", s(&unit), s(&float_unit)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mix"));

    let o = run(&["--mode", "float", "eval", s(&unit), "--point", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diff_lowers_degree() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        &json!({"n": 2, "degree": 2, "mode": "exact", "coeffs": [{"m": [2, 0], "value": {"": "1"}}]}),
    );
    let o = run(&["diff", s(&f), "--m", "1,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g: MonogenicSeries<Rational> = io::series_from_json(&io::parse_json(&stdout(&o)).unwrap()).unwrap();
    let c = g.coeff(&MultiIndex::new(vec![1, 0])).unwrap();
    assert_eq!(io::clifford_to_json(c), json!({"": "2"}));
    assert_eq!(g.len(), 1);
}

fn axis_norms(q_max: usize) -> Value {
    let norms: Vec<Value> = (0..=q_max)
        .map(|q| json!({"m": [q, 0], "ln_norm": axis_ln_norm(1.0, 1.0, q)}))
        .collect();
    json!({"n": 2, "norms": norms})
}

#[test]
fn growth_from_norms_file() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "norms.json", &axis_norms(300));
    let out = dir.path().join("report.csv");
    let o = run(&[
        "growth",
        s(&p),
        "--po",
        "constant:1",
        "--window",
        "100:200",
        "--sigma",
        "1",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.lines().next().unwrap().starts_with('q'));
    assert!(csv.lines().count() > 100);
    assert!(!stderr(&o).is_empty());

    let o = run(&["growth", s(&p), "--po", "constant:1", "--window", "400:500"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("window"), "{}", stderr(&o));
}

#[test]
fn apply_identity_and_dimension_mismatch() {
    let dir = TempDir::new().unwrap();
    let id: OperatorSymbol<Rational> = OperatorSymbol::identity(2, 3);
    let op = write(dir.path(), "id.json", &io::operator_to_json(&id));
    let f = json!({"n": 2, "degree": 3, "mode": "exact", "coeffs": [
        {"m": [1, 1], "value": {"2": "5/3"}},
        {"m": [0, 3], "value": {"": "-1"}}
    ]});
    let fp = write(dir.path(), "f.json", &f);
    let o = run(&["apply", s(&op), s(&fp), "--q-out", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), canonical(&f));

    let g = write(
        dir.path(),
        "g.json",
        &json!({"n": 3, "degree": 1, "mode": "exact", "coeffs": [{"m": [1, 0, 0], "value": {"": "1"}}]}),
    );
    let o = run(&["apply", s(&op), s(&g), "--q-out", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hom_op_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut p: OperatorSymbol<Rational> = OperatorSymbol::new(2);
    let u0 = json!({"n": 2, "degree": 4, "mode": "exact", "coeffs": [
        {"m": [0, 0], "value": {"": "1/2"}}, {"m": [2, 1], "value": {"12": "-3"}}
    ]});
    let u1 = json!({"n": 2, "degree": 4, "mode": "exact", "coeffs": [{"m": [0, 1], "value": {"1": "7/5"}}]});
    p.insert(MultiIndex::zero(2), io::series_from_json(&u0).unwrap()).unwrap();
    p.insert(MultiIndex::new(vec![1, 0]), io::series_from_json(&u1).unwrap()).unwrap();
    let op = write(dir.path(), "op.json", &io::operator_to_json(&p));
    let original = fs::read_to_string(&op).unwrap();

    let hom = dir.path().join("hom.json");
    let o = run(&["op2hom", s(&op), "--q", "3", "--out", s(&hom)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = dir.path().join("back.json");
    let o = run(&["hom2op", s(&hom), "--out", s(&back)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&back).unwrap(), original);

    let o = run(&["op2hom", s(&back), "--q", "3"]);
    assert_eq!(stdout(&o), fs::read_to_string(&hom).unwrap());
}

#[test]
fn identity_hom_table_and_incomplete_table() {
    let dir = TempDir::new().unwrap();
    let id: OperatorSymbol<Rational> = OperatorSymbol::identity(2, 0);
    let op = write(dir.path(), "id.json", &io::operator_to_json(&id));
    let o = run(&["op2hom", s(&op), "--q", "2", "--degree", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = io::parse_json(&stdout(&o)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 6);
    for e in entries {
        let p: Vec<u64> = e["p"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        let coeffs = e["b"]["coeffs"].as_array().unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_eq!(coeffs[0]["m"], json!(p));
        let fact: u64 = p.iter().map(|&k| (1..=k).product::<u64>()).product();
        let expected = if fact == 1 { "1".to_string() } else { format!("1/{fact}") };
        assert_eq!(coeffs[0]["value"], json!({"": expected}));
    }

    let mut v = v;
    v["entries"].as_array_mut().unwrap().remove(2);
    let hom = write(dir.path(), "hom.json", &v);
    let o = run(&["hom2op", s(&hom)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("incomplete"), "{}", stderr(&o));
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", "--list"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), monogenic::verify::CHECK_NAMES.len());

    let cfg = write(dir.path(), "cfg.json", &json!({"samples": 64, "random_instances": 4, "exact_degree": 4}));
    let report = dir.path().join("report.json");
    let o = run(&["verify", s(&cfg), "--check", "normalization", "--check", "cauchy", "--out", s(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = io::parse_json(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.as_array().unwrap().len(), 2);

    let o = run(&["verify", s(&cfg), "--check", "normalization", "--corrupt", "normalization"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NO"));

    let o = run(&["verify", "--check", "no_such_check"]);
    assert_eq!(o.status.code(), Some(2));
}
