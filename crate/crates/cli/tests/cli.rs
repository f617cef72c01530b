use std::fs;
use std::process::{Command, Output};

use ahodge::model::{builtin, rat, to_document, BuiltinName};
use serde_json::{json, Value};

fn ahodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahodge")).args(args).env("AHODGE_THREADS", "2").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = ahodge(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = ahodge(&["validate", "--model", "kt", "--delta", "1"]);
    assert_eq!(code(&ok), 0);
    assert!(!stdout(&ok).contains("FAIL"));

    let zero = ahodge(&["validate", "--model", "kt", "--delta", "0"]);
    assert_eq!(code(&zero), 1);

    let dir = tempfile::tempdir().unwrap();
    let mut doc = to_document(&builtin(BuiltinName::Kt, &rat(1, 1)).unwrap());
    let terms = doc["structure"][1]["terms"].as_array_mut().unwrap();
    let slot = terms.iter_mut().find(|t| t["basis"] == json!([[1, 2], []])).unwrap();
    slot["coeff"]["cdelta"] = json!("3");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, doc.to_string()).unwrap();
    let o = ahodge(&["validate", "--model", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let text = stdout(&o);
    assert!(text.contains("FAIL d_squared"), "{text}");
    assert!(text.contains("witness:"), "{text}");

    let missing = dir.path().join("absent.json");
    assert_eq!(code(&ahodge(&["validate", "--model", missing.to_str().unwrap()])), 2);
    fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(code(&ahodge(&["validate", "--model", dir.path().join("junk.json").to_str().unwrap()])), 2);
}

#[test]
fn model_files_accept_a_delta_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kt.json");
    fs::write(&path, to_document(&builtin(BuiltinName::Kt, &rat(1, 1)).unwrap()).to_string()).unwrap();
    let p = path.to_str().unwrap();
    let j = json_of(&["compare", "--model", p, "--delta", "1/2", "--bidegree", "0,1", "--systems", "bc,delbar"]);
    assert_eq!(j["relation"], "first-in-second");
}

#[test]
fn solve_dimensions() {
    let j = json_of(&["solve", "--model", "kt", "--bidegree", "1,1", "--system", "bc", "--box", "3"]);
    assert_eq!(j["dimension"], 3);
    let j = json_of(&["solve", "--model", "hyperelliptic", "--bidegree", "2,2", "--system", "bc", "--box", "1"]);
    assert_eq!(j["dimension"], 1);
    let j = json_of(&["solve", "--model", "kt", "--delta", "\u{2212}3/7", "--bidegree", "0,0", "--system", "bc", "--box", "1"]);
    assert_eq!(j["delta"], "-3/7");
    assert_eq!(j["dimension"], 1);
    let j = json_of(&["solve", "--model", "kt", "--system", "asd", "--box", "3"]);
    assert_eq!(j["dimension"], 2);
}

#[test]
fn solve_argument_errors() {
    assert_eq!(code(&ahodge(&["solve", "--model", "kt", "--system", "bc"])), 1);
    assert_eq!(code(&ahodge(&["solve", "--model", "kt", "--system", "bc", "--bidegree", "3,0"])), 1);
    assert_eq!(code(&ahodge(&["solve", "--model", "kt", "--system", "nope", "--bidegree", "1,1"])), 1);
    assert_eq!(code(&ahodge(&["solve", "--model", "kt", "--system", "bc", "--bidegree", "1,1", "--bogus"])), 1);
    assert_eq!(code(&ahodge(&["solve", "--model", "kt", "--delta", "0.5", "--system", "bc", "--bidegree", "1,1"])), 1);
    let o = ahodge(&["solve", "--model", "hyperelliptic", "--system", "bc", "--bidegree", "1,1", "--margin", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn compare_reports_relation_and_witness() {
    let o = ahodge(&["compare", "--model", "kt", "--delta", "1/2", "--bidegree", "0,1", "--systems", "bc,delbar"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("bc ⊊ delbar\n"), "{text}");
    assert!(text.contains("witness "), "{text}");

    let o = ahodge(&["compare", "--model", "kt", "--delta", "1", "--bidegree", "2,2", "--systems", "bc,delbar", "--box", "3"]);
    assert!(stdout(&o).starts_with("bc = delbar\n"));
    let o = ahodge(&["compare", "--model", "torus4", "--bidegree", "1,1", "--systems", "bc,delbar", "--box", "1"]);
    assert!(stdout(&o).starts_with("bc = delbar\n"));
    assert_eq!(code(&ahodge(&["compare", "--model", "kt", "--bidegree", "1,1", "--systems", "bc"])), 1);
}

#[test]
fn symbol_and_circle() {
    let o = ahodge(&["symbol", "--model", "kt", "--delta", "1", "--laplacian", "bc", "--samples", "50", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("all invertible"));
    let j = json_of(&["symbol", "--model", "hyperelliptic", "--laplacian", "lap_aeppli", "--samples", "5"]);
    assert_eq!(j["all_invertible"], true);

    let o = ahodge(&["circle", "--delta", "5"]);
    assert!(stdout(&o).starts_with("count 12\n"));
    let j = json_of(&["circle", "--delta", "5"]);
    assert_eq!(j["points"].as_array().unwrap().len(), 12);
    assert_eq!(code(&ahodge(&["circle", "--delta", "-5"])), 1);
}

#[test]
fn diagnostics_find_the_lee_form() {
    let j = json_of(&["diagnostics", "--model", "hyperelliptic"]);
    assert_eq!(j["conformal"], true);
    assert_eq!(j["lee_closed"], true);
    assert_eq!(j["lee_harmonic"], true);
    assert_eq!(j["lee_real"], true);
    assert_eq!(j["gauduchon_defect"], "0");
    assert_eq!(j["bc_aeppli_duality"], true);
    assert_eq!(j["star_involution"], true);

    let j = json_of(&["diagnostics", "--model", "kt"]);
    assert_eq!(j["almost_kahler"], true);
}

#[test]
fn json_output_is_byte_identical_and_sorted() {
    let args = ["solve", "--model", "kt", "--delta", "1/2", "--bidegree", "1,2", "--system", "bc", "--box", "2", "--format", "json"];
    let a = ahodge(&args).stdout;
    let b = ahodge(&args).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(v["elapsed_ms"].is_null());

    let timed = json_of(&["solve", "--model", "kt", "--bidegree", "0,0", "--system", "bc", "--box", "1", "--timing"]);
    assert!(timed["elapsed_ms"].is_u64());
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = ahodge(&["circle", "--delta", "1/2", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["delta"], "1/2");
}
