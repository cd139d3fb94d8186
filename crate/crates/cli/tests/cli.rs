use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("data");
    p.push(name);
    p.display().to_string()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_toriclab")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn loads_plane_without_warnings() {
    let (code, v) = run(&["check", &data("p2.json")]);
    assert_eq!(code, 0);
    assert!(v["warnings"].as_array().unwrap().is_empty());
    assert_eq!(v["results"]["smooth"], true);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn non_primitive_ray_is_normalized() {
    let (code, v) = run(&["check", &data("nonprimitive.json")]);
    assert_eq!(code, 0);
    let w = v["warnings"].as_array().unwrap();
    assert_eq!(w.len(), 1);
    assert!(w[0].as_str().unwrap().contains("[1, 2]"));
    assert_eq!(v["results"]["rays"][0], serde_json::json!([1, 2]));
}

#[test]
fn missing_field_is_a_parse_error() {
    let (code, v) = run(&["check", &data("missing_cones.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ParseError");
    assert_eq!(v["error"]["field"], "max_cones");
    assert_eq!(v["error"]["line"], 1);
}

#[test]
fn unknown_command() {
    let (code, v) = run(&["frobnicate", &data("p2.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnknownCommand");
}

#[test]
fn nvol_of_a1() {
    let (code, v) = run(&["nvol", &data("a1.json"), "--tol", "1e-6"]);
    assert_eq!(code, 0);
    let x = v["results"]["points"][0]["nvol"]["value"].as_f64().unwrap();
    assert!((x - 2.0).abs() < 1e-5);
    assert_eq!(check(&v, "cartier_index_bound")["status"], "pass");
}

#[test]
fn verify_blowup() {
    let (code, v) = run(&["verify", &data("blowup_p2.json"), "--checks", "delta,lex,stringy"]);
    assert_eq!(code, 0, "{v}");
    for c in ["delta", "lex", "stringy"] {
        assert_eq!(check(&v, c)["status"], "pass");
    }
    assert!(v["results"]["steps"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_threefold_all_checks() {
    let (code, v) = run(&["verify", &data("threefold.json")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(check(&v, "bound_terminal")["status"], "pass");
}

#[test]
fn failed_check_exits_one() {
    let (code, v) = run(&["verify", &data("threefold.json"), "--strategy", "first", "--budget", "0", "--checks", "lex"]);
    assert_eq!(code, 1);
    assert_eq!(check(&v, "terminates")["status"], "fail");
}

#[test]
fn bounds_fourfold() {
    let (code, v) = run(&["bounds", "--formula", "thm_4fold", "--N", "1"]);
    assert_eq!(code, 0);
    let val = &v["results"]["formula"]["value"];
    assert!(val.get("log10").is_some());
    let (code, v) = run(&["bounds", "--formula", "cor_terminal", "--b", "1/2", "--rho-d", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["formula"]["value"]["exact"], "524880");
    let (code, _) = run(&["bounds", "--formula", "nope"]);
    assert_eq!(code, 2);
    let (code, v) = run(&["bounds", "--formula", "cor_index_3fold", "--e-plus", "0", "--eps", "0"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "DomainError");
}

#[test]
fn volume_bounds_on_plane() {
    let (code, v) = run(&["bounds", &data("p2_half.json"), "--h", "1,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["volume"]["lc_volume_lower_bound"], "1/4");
    let (code, v) = run(&["bounds", &data("p2.json"), "--h", "1,0,0"]);
    assert_eq!(code, 2);
    assert!(v["error"]["message"].as_str().unwrap().to_lowercase().contains("big"));
}

#[test]
fn subpair_only_for_stringy() {
    let (code, _) = run(&["nvol", &data("p2_subpair.json")]);
    assert_eq!(code, 2);
    let (code, v) = run(&["stringy", &data("p2_subpair.json"), "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(check(&v, "resolution_independence")["status"], "pass");
}

#[test]
fn mmp_after_fans_round_trip() {
    let (code, v) = run(&["mmp-run", &data("o_m1_m2_flip.json")]);
    assert_eq!(code, 0);
    assert_eq!(check(&v, "round_trip")["status"], "pass");
    let steps = v["results"]["steps"].as_array().unwrap();
    assert_eq!(steps[0]["kind"], "Flip");
    // reload through the binary itself
    let after = serde_json::to_string(&steps[0]["after"]).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_toriclab"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(after.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["warnings"].as_array().unwrap().is_empty());
    assert_eq!(r["results"]["support"], "relative");
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn seeded_reports_are_identical() {
    for args in [
        vec!["mmp-run", "threefold.json", "--seed", "7"],
        vec!["mmp-enumerate", "threefold.json", "--seed", "7"],
        vec!["verify", "threefold.json", "--seed", "3"],
        vec!["stringy", "p2_half.json", "--seed", "11"],
    ] {
        let path = data(args[1]);
        let mut a = args.clone();
        a[1] = &path;
        let (_, x) = run(&a);
        let (_, y) = run(&a);
        assert_eq!(serde_json::to_string(&without_timing(x)).unwrap(), serde_json::to_string(&without_timing(y)).unwrap());
    }
}

#[test]
fn small_commands() {
    let (code, v) = run(&["mld", &data("third_11.json"), "--cone", "0,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["mld"], "2/3");
    let (code, v) = run(&["lct", &data("p2.json"), "--d", "0:1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["lct"], "1");
    let (code, v) = run(&["alpha", &data("p2.json"), "--h", "1,0,0"]);
    assert_eq!(code, 0);
    // H = O(1): lct of a line
    assert_eq!(v["results"]["alpha"], "1");
    let (code, v) = run(&["invariants", &data("p2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["topological"]["even_betti"], serde_json::json!([1, 1, 1]));
    let (code, v) = run(&["difficulty", &data("p2_half.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["m"], "18");
    let (code, v) = run(&["cone", &data("p2.json"), "--l", "1,1,1", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["a_e"], "1");
    assert!((v["results"]["nvol"]["value"].as_f64().unwrap() - 9.0).abs() < 1e-4);
}

#[test]
fn pretty_rendering() {
    let out = Command::new(env!("CARGO_BIN_EXE_toriclab")).args(["check", &data("p2.json"), "--pretty"]).output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("check") && s.contains("pass"));
}
