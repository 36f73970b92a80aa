use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = mendler_cli::run(std::iter::once("mendler").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    assert!(err.is_empty(), "{args:?} wrote diagnostics: {err}");
    out
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

const BETA: &str = "(app (clos () (pvar x (ty a)) (var x)) (con c (ty a)))";

#[test]
fn arith_eval() {
    assert_eq!(ok(&["arith", "eval", "(add (lit 2) (lit 3))"]), "(val 5)\n");
    assert_eq!(ok(&["eval-arith", "(add (lit -2) (add (lit 1) (lit 1)))"]), "(val 0)\n");
}

#[test]
fn arith_derivations() {
    let d = json(&["arith", "derive", "(add (lit 2) (lit 3))"]);
    assert_eq!(d["rule"], "ev2");
    assert_eq!(d["premises"].as_array().unwrap().len(), 2);
    assert_eq!(d["premises"][0]["rule"], "ev1");
    let t = json(&["arith", "derive", "--relation", "typof", "(lit 4)"]);
    assert_eq!(t["rule"], "tof1");
    let i = json(&["arith", "derive", "--relation", "istrm", "(add (lit 0) (lit 1))"]);
    assert_eq!(i["rule"], "isAdd");
}

#[test]
fn both_preservation_routes_print_the_same_derivation() {
    let term = "(add (add (lit 1) (lit 2)) (lit -2))";
    let a = json(&["arith", "preserve", term]);
    let b = json(&["arith", "preserve", "--via", "istrm", term]);
    assert_eq!(a, b);
    assert_eq!(a["rule"], "tof1");
}

#[test]
fn typecheck() {
    assert_eq!(ok(&["lang", "typecheck", "--env", "()", "(con c (ty a))"]), "(ty a)\n");
    assert_eq!(ok(&["lang", "typecheck", BETA]), "(ty a)\n");
    assert_eq!(ok(&["lang", "typecheck", "--env", "((y (con d (ty b))))", "(var y)"]), "(ty b)\n");
    let out = ok(&["lang", "typecheck", "--emit-derivation", "(con c (ty a))"]);
    let (ty, d) = out.split_once('\n').unwrap();
    assert_eq!(ty, "(ty a)");
    let d: Value = serde_json::from_str(d).unwrap();
    assert!(d["rule"].is_string());
}

#[test]
fn untypable_input_is_a_domain_failure() {
    let (code, out, err) = run(&["lang", "typecheck", "(var x)"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(!err.is_empty());
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["arith", "eval"],
        &["arith", "eval", "(mul (lit 1) (lit 2))"],
        &["lang", "trace", "(app"],
        &["laws", "--suite", "nope"],
        &["laws", "--suite", "kernel", "--mutation", "nope"],
        &["fuzz-preservation", "--count", "ten"],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?} wrote data: {out}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_is_data() {
    let (code, out, err) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("fuzz-preservation"));
    assert!(err.is_empty());
}

#[test]
fn trace_of_a_value_takes_no_steps() {
    assert_eq!(ok(&["lang", "trace", "(con c (ty a))"]), "0 (con c (ty a))\nvalue after 0 steps\n");
}

#[test]
fn trace_through_beta() {
    let out = ok(&["lang", "trace", BETA]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "  by E-BETA");
    assert_eq!(lines[2], "1 (scope (env ((x (con c (ty a))))) (var x))");
    assert_eq!(*lines.last().unwrap(), "value after 3 steps");
}

#[test]
fn trace_emits_one_derivation_per_step() {
    let out = ok(&["lang", "trace", "--emit-derivations", BETA]);
    let ds: Vec<Value> = out.lines().filter_map(|l| serde_json::from_str(l.trim()).ok()).collect();
    assert_eq!(ds.len(), 3);
    assert_eq!(ds[0]["rule"], "E-BETA");
}

#[test]
fn failed_match_is_stuck_not_an_error() {
    let out = ok(&["lang", "trace", "(scope (match (pcon d (ty a)) (con c (ty a))) (con c (ty a)))"]);
    assert!(out.ends_with("stuck after 0 steps\n"), "{out}");
    assert_eq!(ok(&["lang", "step", "(scope (match (pcon d (ty a)) (con c (ty a))) (var x))"]), "stuck\n");
}

#[test]
fn trace_respects_fuel() {
    let out = ok(&["lang", "trace", "--fuel", "1", BETA]);
    assert!(out.ends_with("fuel exhausted after 1 steps\n"), "{out}");
}

#[test]
fn trace_reads_environment_files() {
    let dir = std::env::temp_dir().join(format!("mendler-env-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("env.sexp");
    std::fs::write(&file, "((z (con k (ty b))))\n").unwrap();
    let out = ok(&["lang", "trace", "--env-file", file.to_str().unwrap(), "(var z)"]);
    assert_eq!(out, "0 (var z)\n  by E-VAR\n1 (con k (ty b))\nvalue after 1 steps\n");
    let (code, _, _) = run(&["lang", "trace", "--env-file", dir.join("missing").to_str().unwrap(), "(var z)"]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn step_and_derive() {
    assert_eq!(ok(&["lang", "step", BETA]), "(scope (env ((x (con c (ty a))))) (var x))\n");
    assert_eq!(ok(&["lang", "step", "(con c (ty a))"]), "value\n");
    let d = json(&["lang", "derive", "--judgement", "step", BETA]);
    assert_eq!(d["rule"], "E-BETA");
    let t = json(&["lang", "derive", BETA]);
    assert!(t["rule"].is_string());
    let (code, _, _) = run(&["lang", "derive", "--judgement", "step", "(con c (ty a))"]);
    assert_eq!(code, 1);
}

#[test]
fn parse_and_print_round_trip() {
    let src = "(scope   (join (env ()) (match (pvar y (ty a)) (con c (ty a))))\n (var y))";
    let canonical = ok(&["lang", "parse", src]);
    assert_eq!(canonical, "(scope (join (env ()) (match (pvar y (ty a)) (con c (ty a)))) (var y))\n");
    let encoded = ok(&["lang", "parse", "--json", src]);
    assert_eq!(ok(&["lang", "print", &encoded]), canonical);
}

#[test]
fn laws_report_json_and_exit_codes() {
    let r = json(&["laws", "--suite", "kernel", "--small"]);
    assert_eq!(r["suite"], "kernel");
    assert_eq!(r["failed"], 0);
    let (code, out, _) = run(&["laws", "--suite", "kernel", "--small", "--mutation", "swapped-fmap"]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert!(r["failed"].as_u64().unwrap() > 0);
    let text = ok(&["laws", "--suite", "lang", "--small", "--format", "text"]);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn empty_fuzz_run_passes() {
    let r = json(&["fuzz-preservation", "--seed", "42", "--count", "0"]);
    assert_eq!(r["generated"], 0);
    assert_eq!(r["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn counterexamples_are_dumped_and_replay() {
    let dir = std::env::temp_dir().join(format!("mendler-cx-{}", std::process::id()));
    let args = ["fuzz-preservation", "--seed", "5", "--count", "300", "--mutation", "left-biased-typing"];
    let mut with_dump = args.to_vec();
    with_dump.extend(["--dump", dir.to_str().unwrap()]);
    let (code, out, _) = run(&with_dump);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&out).unwrap();
    let first = &report["counterexamples"][0];
    let file = dir.join(format!("cx-5-{}.json", first["index"]));
    let file = file.to_str().unwrap();

    let (code, out, _) = run(&["fuzz-preservation", "--replay", file, "--mutation", "left-biased-typing"]);
    assert_eq!(code, 1);
    let again: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(again["reproduced"], true);
    assert_eq!(&again["counterexample"], first);

    let (code, out, _) = run(&["fuzz-preservation", "--replay", file]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["reproduced"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dumps() {
    let sigs = json(&["dump", "sig"]);
    for name in ["trm", "typ", "pat", "lang"] {
        assert!(sigs.get(name).is_some(), "{name}");
    }
    assert_eq!(json(&["dump", "sig", "trm"]), sigs["trm"]);
    assert_eq!(ok(&["dump", "arith", "--depth", "1"]).lines().count(), 5);
    assert_eq!(ok(&["dump", "arith", "--depth", "2"]).lines().count(), 30);
    for line in ok(&["dump", "lang", "--depth", "2", "--generated", "20"]).lines() {
        assert_eq!(ok(&["lang", "parse", line]).trim_end(), line);
    }
}

#[test]
fn identical_argv_gives_identical_bytes() {
    for args in [
        &["fuzz-preservation", "--seed", "7", "--count", "50"][..],
        &["dump", "lang", "--depth", "2", "--generated", "30", "--seed", "3"],
        &["lang", "trace", "--emit-derivations", BETA],
    ] {
        assert_eq!(run(args), run(args), "{args:?}");
    }
}

#[test]
fn binary_uses_fuel_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_mendler");
    let out = Command::new(bin).args(["lang", "trace", BETA]).env("MENDLER_FUEL", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("fuel exhausted after 2 steps\n"));
    assert!(out.stderr.is_empty());

    let out = Command::new(bin).args(["lang", "trace", BETA]).env("MENDLER_FUEL", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let out = Command::new(bin).args(["arith", "eval", "(add (lit 2) (lit 3))"]).output().unwrap();
    assert_eq!(out.stdout, b"(val 5)\n");
}
