use std::path::PathBuf;
use std::process::Command;

use lax::cli::run;
use lax::corpus;
use lax::dsl::{emit, parse};
use lax::foliation::table_difference;
use serde_json::Value;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

fn lax(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["lax"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lax-dsl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn corpus_texts() -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "lax"))
        .collect();
    files.sort();
    assert!(files.len() >= 8);
    files.into_iter().map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap())).collect()
}

#[test]
fn corpus_round_trip_is_idempotent() {
    for (path, text) in corpus_texts() {
        let doc = parse(&text).unwrap_or_else(|d| panic!("{path}: {d:?}")).document;
        let once = emit(&doc);
        let again = parse(&once).unwrap().document;
        assert_eq!(again.items(), doc.items(), "{path}");
        assert_eq!(emit(&again), once, "{path}");
        assert_eq!(once.lines().count(), doc.items().len());
    }
}

#[test]
fn corpus_files_match_builtins() {
    let pairs = [
        ("aff1.lax", corpus::aff1()),
        ("abelian2.lax", corpus::ab2()),
        ("abelian3.lax", corpus::abelian(3)),
        ("sl2.lax", corpus::sl2()),
        ("lie3.lax", corpus::so3()),
        ("lie3.lax", corpus::heisenberg()),
        ("tangent.lax", corpus::tr1()),
        ("tangent.lax", corpus::tr2()),
        ("actions.lax", corpus::aff_r()),
        ("actions.lax", corpus::sl2_r()),
        ("foliations.lax", corpus::fol_r2()),
        ("bad_jacobi.lax", corpus::bad_jacobi()),
    ];
    for (file, builtin) in pairs {
        let doc = parse(&std::fs::read_to_string(corpus_dir().join(file)).unwrap()).unwrap().document;
        // Odd-generator origins are bookkeeping of the constructions and
        // are not part of the text format; compare tables only.
        let parsed = doc.algebroid(builtin.name()).unwrap_or_else(|| panic!("{file}: {}", builtin.name()));
        assert_eq!(table_difference(parsed, &builtin), None, "{file}");
    }
}

#[test]
fn cohomology_csv_golden() {
    let (code, out, _) = lax(&[
        "cohomology", &corpus_file("abelian2.lax"), "--name", "Ab2", "--kind", "def", "--deg", "-1..2", "--weight", "0..0",
        "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "degree,weight,betti\n-1,0,2\n0,0,4\n1,0,2\n2,0,0\n");
}

#[test]
fn morita_json_golden() {
    let args = [
        "morita", &corpus_file("aff1.lax"), "--name", "Aff1", "--submersion", "S1", "--kind", "dr", "--max-deg", "2",
        "--weight", "0..2",
    ];
    let (code, out, _) = lax(&args);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "morita");
    assert_eq!(v["pass"], true);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 9);
    for b in blocks {
        let keys: Vec<&str> = b.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["betti_left", "betti_right", "degree", "pass", "weight"]);
        assert_eq!(b["betti_left"], b["betti_right"]);
    }
    let row0: Vec<u64> = blocks.iter().filter(|b| b["weight"] == 0).map(|b| b["betti_left"].as_u64().unwrap()).collect();
    assert_eq!(row0, [1, 1, 0]);
    // Byte-stable across runs.
    assert_eq!(lax(&args).1, out);
}

#[test]
fn validate_bad_jacobi_fails_with_residual() {
    let (code, out, _) = lax(&["validate", &corpus_file("bad_jacobi.lax")]);
    assert_eq!(code, 1);
    assert!(out.contains("[d, d](e1) = -2*e1*e2*e3"), "{out}");
    let (code, out, _) = lax(&["validate", &corpus_file("bad_jacobi.lax"), "--format", "json"]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["pass"], false);
}

#[test]
fn validate_corpus_passes() {
    for (path, _) in corpus_texts() {
        let expected = if path.ends_with("bad_jacobi.lax") { 1 } else { 0 };
        assert_eq!(lax(&["validate", &path]).0, expected, "{path}");
    }
}

#[test]
fn input_errors_exit_two() {
    let syntax = scratch("syntax.lax", "algebroid A { base {} fiber { e1:0 }");
    let (code, _, err) = lax(&["validate", &syntax]);
    assert_eq!(code, 2);
    assert!(err.contains("error[E002] 1:"), "{err}");
    let weight = scratch("weight.lax", "algebroid W { base { x:1 } fiber { X:1 } anchor { X -> x*d/dx; } bracket {} }");
    let (code, _, err) = lax(&["validate", &weight]);
    assert_eq!(code, 2);
    assert!(err.contains("E007"), "{err}");
    let self_bracket = scratch("self.lax", "algebroid A { base {} fiber { e1:0, e2:0 } anchor {} bracket { [e1,e1] = e2; } }");
    let (code, _, err) = lax(&["validate", &self_bracket]);
    assert_eq!(code, 2);
    assert!(err.contains("bracket of a generator with itself must be zero"));
    assert_eq!(lax(&["validate", "/nonexistent/file.lax"]).0, 2);
    assert_eq!(lax(&["validate", &corpus_file("aff1.lax"), "--bogus"]).0, 2);
    assert_eq!(lax(&["frobnicate"]).0, 2);
    let aff = corpus_file("aff1.lax");
    assert_eq!(lax(&["cohomology", &aff, "--name", "Nope", "--kind", "dr", "--deg", "0..1", "--weight", "0..0"]).0, 2);
    assert_eq!(lax(&["cohomology", &aff, "--name", "Aff1", "--kind", "dr", "--deg", "3..1", "--weight", "0..0"]).0, 2);
    assert_eq!(lax(&["morita", &aff, "--name", "Aff1", "--submersion", "S9", "--kind", "dr", "--max-deg", "1", "--weight", "0..0"]).0, 2);
}

#[test]
fn mc_exit_codes() {
    let ab3 = corpus_file("abelian3.lax");
    assert_eq!(lax(&["mc", &ab3, "--name", "Ab3", "--cochain", "Rot"]).0, 0);
    let (code, out, _) = lax(&["mc", &ab3, "--name", "Ab3", "--cochain", "Cyc"]);
    assert_eq!(code, 1);
    assert!(out.contains("not Maurer–Cartan"));
    assert_eq!(lax(&["mc", &corpus_file("abelian2.lax"), "--name", "Ab2", "--cochain", "C"]).0, 0);
}

#[test]
fn pullback_output_parses_back() {
    let out_path = scratch("pulled.lax", "");
    let (code, _, _) =
        lax(&["pullback", &corpus_file("aff1.lax"), "--name", "Aff1", "--submersion", "S1", "--out", &out_path]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text,
        "algebroid pi!Aff1 { base { u:1 } fiber { v_u:1, e1:0, e2:0 } anchor { v_u -> d/du; } bracket { [e1,e2] = e2; } }\n"
    );
    assert_eq!(lax(&["validate", &out_path]).0, 0);
}

#[test]
fn foliation_checks() {
    let f = corpus_file("foliations.lax");
    let (code, out, _) = lax(&["foliation", &f, "--check", "def-vs-bott", "--name", "Fx", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("0,3,1,1,true\n1,3,0,0,true\n"), "{out}");
    for h in ["H", "Ht"] {
        assert_eq!(lax(&["foliation", &f, "--check", "flag", "--name", h, "--fiber", "z"]).0, 0, "{h}");
    }
    assert_eq!(lax(&["foliation", &f, "--check", "flag", "--name", "Hbad", "--fiber", "z"]).0, 1);
    assert_eq!(lax(&["foliation", &f, "--check", "flag", "--name", "H"]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lax");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["validate", &corpus_file("aff1.lax")]), Some(0));
    assert_eq!(status(&["validate", &corpus_file("bad_jacobi.lax")]), Some(1));
    assert_eq!(status(&["validate", "--nope"]), Some(2));
}
