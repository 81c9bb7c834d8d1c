use std::process::Command;

use clap::Parser;
use ramlang::json::emit_plot_data;
use ramlang::{run, Cli, Outcome};
use ramlang_core::localfield::{with_precision, Extension, TowerDescriptor, DEFAULT_PREC};
use ramlang_core::plfun::PLFun;
use ramlang_core::rat::rat;
use serde_json::{json, Value};

fn go(args: &[&str]) -> Outcome {
    let mut all = vec!["ramlang"];
    all.extend_from_slice(args);
    let cli = Cli::try_parse_from(all).expect("arguments parse");
    run(&cli.into_config().expect("valid config"))
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ramlang")).args(args).env_remove("RAMLANG_PREC").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn conductor_suite_on_the_cubic() {
    let o = go(&["verify", "--suite", "conductor-shift", "--tower", "AS3"]);
    assert_eq!(o.code, 0);
    let t = &o.report["result"]["towers"]["F_3[AS1]"];
    assert_eq!(t["breaks"], json!({ "ell": "1/3", "u": "1/1", "c": "2/3" }));
    assert_eq!(t["u_minus_ell"], "2/3");
    assert_eq!(o.report["suite"], "conductor-shift");
}

#[test]
fn counterexample_report() {
    let o = go(&["cft", "counterexample", "--p", "3"]);
    assert_eq!(o.code, 0);
    let r = &o.report["result"];
    assert_eq!(r["invariants"], json!([3, 3]));
    assert_eq!(r["d"], "2/1");
    assert_eq!(r["gamma_d_order"], 3);
    assert_eq!(r["gamma_d_cyclic"], true);
    let two = go(&["cft", "counterexample", "--p", "2"]);
    assert_eq!(two.report["result"]["invariants"], json!([2, 2]));
    assert_eq!(two.report["result"]["d"], "3/1");
}

#[test]
fn unit_quotient_action() {
    let o = go(&["cft", "quotient", "--p", "3", "--tail", "3"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.report["result"]["invariants"], json!([3, 3]));
    assert_eq!(o.report["result"]["last_break"], "2/1");
}

#[test]
fn trivial_datum_has_identity_phi() {
    let o = go(&["hh", "--datum", "trivial"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.report["result"]["phi_is_identity"], true);
    let inline = go(&["hh", "--datum", r#"{"mul": [[0]]}"#]);
    assert_eq!(inline.report["result"]["phi"], o.report["result"]["phi"]);
}

fn segments(v: &Value) -> Vec<(String, String)> {
    v["segments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["start"].as_str().unwrap().to_string(), s["slope"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn plot_tables() {
    let id = emit_plot_data(&PLFun::identity());
    assert_eq!(segments(&id), vec![("0/1".to_string(), "1/1".to_string())]);
    assert_eq!(id["segments"][0]["end"], Value::Null);

    let o = go(&["hh", "--tower", "AS3"]);
    let phi = &o.report["result"]["phi"];
    assert_eq!(segments(phi), vec![("0/1".into(), "3/1".into()), ("1/3".into(), "1/1".into())]);
    assert_eq!(phi["segments"][0]["end"], "1/3");

    // tame-then-wild tower: the tame step has no positive depths, so its
    // normalized phi is the identity and L/F must match L/K
    let desc = TowerDescriptor::base(3, 1).tame(2).artin_schreier(2);
    let datum = with_precision(&desc, DEFAULT_PREC, |t| Extension::full(t)?.realize_ramdatum()).unwrap();
    let tame = PLFun::identity();
    let lk = with_precision(&desc, DEFAULT_PREC, |t| Extension::new(t, 1, 2)?.realize_ramdatum()).unwrap();
    let composed = tame.compose(&lk.hh_phi());
    assert_eq!(emit_plot_data(&datum.hh_phi()), emit_plot_data(&composed));
    let table = emit_plot_data(&composed);
    let starts: Vec<_> = segments(&table).into_iter().map(|(s, _)| s).collect();
    let kinks: Vec<String> =
        lk.hh_phi().breaks().iter().map(ramlang_core::rat::fmt_rat).collect();
    assert_eq!(starts, kinks);
    assert_eq!(composed.eval(rat(1, 2)), datum.hh_phi().eval(rat(1, 2)));
}

#[test]
fn dlparam_report() {
    let o = go(&["dlparam", "--group", "SL2", "--x", "1/4", "--r", "1/2", "--X", "[1,[0,1]]", "--field", "9"]);
    assert_eq!(o.code, 0);
    let r = &o.report["result"];
    assert_eq!(r["nondegenerate"], true);
    assert_eq!(r["x"], json!(["1/4", "-1/4"]));
    assert!(r["class"].as_str().unwrap().starts_with("r=1/2;Z=["));
    assert!(r["Z"].is_array());
    let zero = go(&["dlparam", "--group", "SL2", "--x", "1/4", "--r", "1/2", "--X", "[1,0]", "--field", "9"]);
    assert_eq!(zero.report["result"]["nondegenerate"], false);
}

#[test]
fn depth_zero_classes() {
    let o = go(&["depth0", "--group", "SL2", "--q", "3"]);
    assert_eq!(o.code, 0);
    let canon: Vec<Value> =
        o.report["result"]["classes"].as_array().unwrap().iter().map(|c| c["canonical"].clone()).collect();
    assert_eq!(canon, vec![json!(["0/1"]), json!(["1/4"]), json!(["1/2"])]);
    let push = go(&["depth0", "--group", "GL2", "--q", "3", "--x", "vertex", "--theta", r#"[["1/4","3/4"],["3/4","1/4"]]"#]);
    assert_eq!(push.code, 0);
    assert_eq!(push.report["result"]["pushforward"][0]["canonical"], json!(["1/4", "3/4"]));
    let split = go(&["depth0", "--group", "GL2", "--q", "3", "--x", "barycenter", "--theta", r#"[["1/4","3/4"],["3/4","1/4"]]"#]);
    assert_eq!(split.code, 2);
}

#[test]
fn randomized_suites_are_reproducible() {
    let a = go(&["verify", "--suite", "parameter-invariance", "--seed", "7", "--samples", "5"]);
    let b = go(&["verify", "--suite", "parameter-invariance", "--seed", "7", "--samples", "5"]);
    let c = go(&["verify", "--suite", "parameter-invariance", "--seed", "8", "--samples", "5"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.render(), b.render());
    assert_ne!(a.render(), c.render());
    assert_eq!(a.report["seed"], 7);
    let s = go(&["verify", "--suite", "stable-association", "--seed", "3", "--samples", "40"]);
    assert_eq!(s.code, 0);
    assert_eq!(s.render(), go(&["verify", "--suite", "stable-association", "--seed", "3", "--samples", "40"]).render());
}

#[test]
fn every_suite_is_listed_and_runs() {
    let o = go(&["verify", "--suite", "list"]);
    let names: Vec<&String> = o.report["result"]["suites"].as_object().unwrap().keys().collect();
    assert_eq!(names.len(), 14);
    for name in names {
        if name == "equivalent-clauses" {
            continue;
        }
        let r = go(&["verify", "--suite", name, "--samples", "10"]);
        assert_eq!(r.code, 0, "{name}: {}", r.report["failures"]);
    }
}

#[test]
fn equivalent_clauses_exit_codes() {
    let ab = go(&["verify", "--suite", "equivalent-clauses", "--tower", "F_3[tame2,AS2]"]);
    assert_eq!(ab.code, 0);
    // non-abelian: the field-level clause holds below u
    let bad = go(&["verify", "--suite", "equivalent-clauses", "--tower", "F_3[tame2,AS1]"]);
    assert_eq!(bad.code, 1);
    assert_eq!(bad.report["failures"], json!(["F_3[tame2,AS1]"]));
}

#[test]
fn tower_command() {
    let o = go(&["tower", "--tower", "AS5"]);
    assert_eq!(o.code, 0, "{}", o.report["failures"]);
    assert_eq!(o.report["result"]["galois"], true);
    assert_eq!(o.report["result"]["datum"]["breaks"]["c"], "4/5");
    let nongalois = go(&["tower", "--tower", "F_3[unr2,tame4,AS1]"]);
    assert_eq!(nongalois.report["result"]["galois"], false);
    assert!(nongalois.report["result"]["step_phi"]["segments"].is_array());
}

#[test]
fn input_object_supplies_options() {
    let o = go(&["verify", "--input", r#"{"suite": "conductor-shift", "tower": "AS3"}"#]);
    assert_eq!(o.code, 0);
    assert_eq!(o.report["suite"], "conductor-shift");
    let path = std::env::temp_dir().join("ramlang-input-test.json");
    std::fs::write(&path, r#"{"group": "SL2", "q": 3}"#).unwrap();
    let d = go(&["depth0", "--input", path.to_str().unwrap()]);
    assert_eq!(d.code, 0);
}

#[test]
fn binary_exit_codes_and_outputs() {
    let (code, text) = bin(&["verify", "--suite", "conductor-shift", "--tower", "AS3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["prec"], 40);

    let (code, _) = bin(&["hh", "--datum", "{not json"]);
    assert_eq!(code, 2);
    let (code, _) = bin(&["dlparam", "--group", "SL2"]);
    assert_eq!(code, 2);
    let (code, _) = bin(&["nonsense"]);
    assert_eq!(code, 2);
    let (code, text) = bin(&["verify", "--suite", "equivalent-clauses", "--tower", "F_3[tame2,AS1]"]);
    assert_eq!(code, 1);
    assert!(text.contains("\"F_3[tame2,AS1]\""));

    let out = std::env::temp_dir().join("ramlang-json-out-test.json");
    let (code, text) = bin(&["cft", "counterexample", "--p", "3", "--json-out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);

    let env = Command::new(env!("CARGO_BIN_EXE_ramlang"))
        .args(["hh", "--tower", "AS3"])
        .env("RAMLANG_PREC", "64")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["prec"], 64);
    let (code, _) = bin(&["hh", "--tower", "AS3", "--prec", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn datum_json_round_trips() {
    let o = go(&["hh", "--tower", "F_3[tame2,AS2]"]);
    let d = &o.report["result"]["datum"];
    for key in ["elements", "mul", "inertia", "depth", "e", "e_base"] {
        assert!(!d[key].is_null(), "{key}");
    }
    assert_eq!(d["e"], 6);
    let again = go(&["hh", "--datum", &d.to_string()]);
    assert_eq!(again.code, 0);
    assert_eq!(again.report["result"]["phi"], o.report["result"]["phi"]);
    assert_eq!(again.report["result"]["datum"], *d);
    let phi = &o.report["result"]["phi"];
    assert_eq!(phi["breaks"].as_array().unwrap().len(), phi["slopes"].as_array().unwrap().len());
    let mut wrong = d.clone();
    wrong["e"] = json!(5);
    assert_eq!(go(&["hh", "--datum", &wrong.to_string()]).code, 2);
}
