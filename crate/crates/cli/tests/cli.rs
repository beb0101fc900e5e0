use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use amensweep_core::chains::{alt, Chain};
use amensweep_core::multicomplex::{AlgebraicSimplex, Multicomplex};
use amensweep_core::rational::{parse_q, qi};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_amensweep"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// The last JSON line on stdout.
fn report(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    let line = text.lines().last().unwrap_or_else(|| panic!("no report; stderr: {}", String::from_utf8_lossy(&o.stderr)));
    serde_json::from_str(line).expect("report is JSON")
}

fn p(dir: &Path, f: &str) -> String {
    dir.join(f).display().to_string()
}

fn gen(dir: &Path, args: &[&str]) -> PathBuf {
    let out = dir.to_path_buf();
    let mut a = vec!["gen-example"];
    a.extend_from_slice(args);
    let o = dir.display().to_string();
    a.extend_from_slice(&["--out", &o]);
    let res = run(&a);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = p(dir, name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

#[test]
fn synthetic_certify_verify_round_trip() {
    let t = tempfile::tempdir().unwrap();
    let d = gen(t.path(), &["synthetic", "--seed", "0"]);
    let cert = p(&d, "cert.json");
    let o = run(&["certify", &p(&d, "complex.json"), &p(&d, "action.json"), &p(&d, "cycle.json"), "--steps", "1", "--out", &cert]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["residual_norm"], "0");
    let o = run(&["verify", &cert, "--complex", &p(&d, "complex.json"), "--action", &p(&d, "action.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["ok"], true);
}

#[test]
fn verify_rejects_tampering_and_hash_mismatch() {
    let t = tempfile::tempdir().unwrap();
    let d = gen(t.path(), &["synthetic", "--seed", "1"]);
    let cert = p(&d, "cert.json");
    let o = run(&["certify", &p(&d, "complex.json"), &p(&d, "action.json"), &p(&d, "cycle.json"), "--steps", "1", "--out", &cert]);
    assert_eq!(code(&o), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let c = v["partial_bounding"][0]["coeff"].as_str().unwrap().to_string();
    v["partial_bounding"][0]["coeff"] = Value::from((parse_q(&c).unwrap() + qi(1)).to_string());
    let bad = write(&d, "tampered.json", &v);
    let o = run(&["verify", &bad, "--complex", &p(&d, "complex.json")]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["location"], "PartialBoundary");

    let other = tempfile::tempdir().unwrap();
    let e = gen(other.path(), &["synthetic", "--seed", "3", "--sheets", "4"]);
    let o = run(&["verify", &cert, "--complex", &p(&e, "complex.json")]);
    assert_eq!(code(&o), 2);
    let o = run(&["verify", &cert, "--complex", &p(&d, "complex.json"), "--action", &p(&e, "action.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn circle_five_steps_and_window_exhaustion() {
    let t = tempfile::tempdir().unwrap();
    let d = gen(t.path(), &["circle", "--m", "3", "--windings", "64"]);
    let cert = p(&d, "cert.json");
    let o = run(&["certify", &p(&d, "complex.json"), &p(&d, "action.json"), &p(&d, "cycle.json"), "--steps", "5", "--out", &cert]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let residual = parse_q(r["residual_norm"].as_str().unwrap()).unwrap();
    assert!(residual * qi(32) <= qi(3));
    let o = run(&["verify", &cert, "--complex", &p(&d, "complex.json"), "--action", &p(&d, "action.json")]);
    assert_eq!(code(&o), 0);
    let o = run(&["verify", &cert]);
    assert_eq!(code(&o), 0);

    let small = tempfile::tempdir().unwrap();
    let s = gen(small.path(), &["circle", "--windings", "8"]);
    let o = run(&["certify", &p(&s, "complex.json"), &p(&s, "action.json"), &p(&s, "cycle.json"), "--steps", "5", "--out", &p(&s, "cert.json")]);
    assert_eq!(code(&o), 3);
    let r = report(&o);
    assert!(r["location"].as_str().unwrap().starts_with("element "));
}

#[test]
fn gen_example_outputs() {
    let t = tempfile::tempdir().unwrap();
    let d = gen(t.path(), &["circle", "--m", "3", "--windings", "4", "--explicit"]);
    let o = run(&["validate", &p(&d, "complex.json"), &p(&d, "action.json"), &p(&d, "cycle.json")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen(a.path(), &["synthetic", "--seed", "7"]);
    gen(b.path(), &["synthetic", "--seed", "7"]);
    for f in ["complex.json", "action.json", "cycle.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    let o = run(&["gen-example", "circle", "--m", "2", "--out", &p(t.path(), "bad")]);
    assert_eq!(code(&o), 1);
    let o = run(&["gen-example", "circle", "--windings", "1", "--out", &p(t.path(), "bad")]);
    assert_eq!(code(&o), 1);
}

fn sphere() -> (Multicomplex, Chain) {
    let faces: Vec<Vec<&str>> = vec![vec!["a", "b", "c"], vec!["a", "b", "d"], vec!["a", "c", "d"], vec!["b", "c", "d"]];
    let k = Multicomplex::simplicial(&faces);
    let mut c = Chain::zero(2);
    for (t, s) in [(["a", "b", "c"], 1), (["a", "b", "d"], -1), (["a", "c", "d"], 1), (["b", "c", "d"], -1)] {
        c.add_term(AlgebraicSimplex::of(&t.join("|"), &t), qi(s));
    }
    (k, alt(&c))
}

#[test]
fn validate_and_seminorm_examples() {
    let t = tempfile::tempdir().unwrap();
    let (k, z) = sphere();
    let kp = write(t.path(), "sphere.json", &k.to_json_value());
    let zp = write(t.path(), "class.json", &z.to_json_value());
    let o = run(&["validate", &kp, &zp]);
    assert_eq!(code(&o), 0);
    let o = run(&["seminorm", &kp, &zp, "--out", &p(t.path(), "lp.json"), "--decimal"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["value"], "4");
    assert_eq!(r["value_approx"], "~4.000000");
    assert!(t.path().join("lp.json").exists());

    let d = gen(&t.path().join("s"), &["synthetic", "--seed", "0"]);
    let o = run(&["seminorm", &p(&d, "complex.json"), &p(&d, "cycle.json")]);
    assert_eq!(report(&o)["value"], "0");

    let mut open = Chain::zero(1);
    open.add_term(AlgebraicSimplex::of("a|b", &["a", "b"]), qi(1));
    let op = write(t.path(), "open.json", &open.to_json_value());
    let o = run(&["seminorm", &kp, &op]);
    assert_eq!(code(&o), 1);

    let mut kv = k.to_json_value();
    let faces = kv["simplices"].as_array_mut().unwrap().iter_mut().find(|s| s["id"] == "a|b|c").unwrap();
    faces["faces"]["a|b"] = Value::from("b|c");
    let corrupt = write(t.path(), "corrupt.json", &kv);
    let o = run(&["validate", &corrupt]);
    assert_eq!(code(&o), 1);
    assert!(report(&o)["location"].as_str().is_some());
    let o = run(&["validate", &p(t.path(), "missing.json")]);
    assert_eq!(code(&o), 2);
}

fn hexagon() -> Multicomplex {
    let edges: Vec<Vec<String>> = (0..6)
        .map(|i| {
            let mut v = vec![format!("c{i}"), format!("c{}", (i + 1) % 6)];
            v.sort();
            v
        })
        .collect();
    Multicomplex::simplicial(&edges)
}

fn cover(members: &[(&str, &[&str])]) -> Value {
    Value::from(serde_json::json!({
        "members": members.iter().map(|(id, vs)| serde_json::json!({"id": id, "vertices": vs, "amenable": true})).collect::<Vec<_>>()
    }))
}

#[test]
fn cover_advice_and_coloring() {
    let t = tempfile::tempdir().unwrap();
    let kp = write(t.path(), "hex.json", &hexagon().to_json_value());
    let all = ["c0", "c1", "c2", "c3", "c4", "c5"];
    let one = write(t.path(), "one.json", &cover(&[("X", &all)]));
    let o = run(&["cover", &kp, &one]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["multiplicity"], 1);
    assert!(r["coloring"].as_object().unwrap().values().all(|c| c == 0));

    let arcs = write(t.path(), "arcs.json", &cover(&[("A", &["c0", "c1", "c2", "c3"]), ("B", &["c3", "c4", "c5", "c0"])]));
    let o = run(&["cover", &kp, &arcs]);
    assert_eq!(report(&o)["advice"], "subdivide");
    let o = run(&["cover", &kp, &arcs, "--subdivide", "1", "--pullback", "open-star"]);
    let r = report(&o);
    assert_eq!(code(&o), 0);
    assert_eq!(r["subdivisions"], 1);
    assert!(r["coloring"].is_object());
}
