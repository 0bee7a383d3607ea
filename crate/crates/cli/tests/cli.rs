//! In-process runs of `twistc` checking output text, JSON and exit codes.

use std::path::{Path, PathBuf};

use serde_json::Value;
use twist_cli::{exit, run};

fn corpus(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    p.to_string_lossy().into_owned()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn twistc(args: &[&str], stdin: &str) -> Out {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("twistc").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn schema_check(json: &Value) {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/solve.schema.json"))
        .unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(json).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{json}");
}

#[test]
fn sudoku_first_row() {
    let o = twistc(&["solve", &corpus("sudoku.tw"), "--filter", r"^P\(1,", "--true-only"], "");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|l| l.starts_with("P(1,") && l.ends_with(" = true")));
    assert!(lines.contains(&"P(1,8,1) = true"));
}

#[test]
fn xor_dimacs() {
    let o = twistc(&["dimacs", &corpus("xor.tw")], "");
    assert_eq!(o.stdout, "c X(p) = 1\nc X(q) = 2\np cnf 2 2\n1 2 0\n-1 -2 0\n");
    let o = twistc(&["dimacs", "--no-comments", &corpus("xor.tw")], "");
    assert_eq!(o.stdout, "p cnf 2 2\n1 2 0\n-1 -2 0\n");
}

#[test]
fn unbound_variable_diagnostic() {
    let o = twistc(&["check", &corpus("bad.tw")], "");
    assert_eq!(o.code, exit::USER);
    assert!(o.stderr.contains("bad.tw:1:28: error: unbound variable $k"), "{}", o.stderr);
    assert!(o.stderr.contains("^^"));
    assert!(o.stdout.is_empty());
}

#[test]
fn stdin_input_and_origin() {
    let o = twistc(&["check", "-"], "p and\r\n");
    assert_eq!(o.code, exit::USER);
    assert!(o.stderr.starts_with("<stdin>:"), "{}", o.stderr);
    let o = twistc(&["solve", "-"], "p and not q");
    assert_eq!(o.stdout, "p = true\nq = false\n");
}

#[test]
fn several_models_have_headers() {
    let o = twistc(&["solve", "-", "--limit", "5"], "p or q");
    assert_eq!(o.code, exit::OK);
    assert_eq!(o.stdout.matches("# model").count(), 3);
    assert!(o.stdout.starts_with("# model 1\n"));
}

#[test]
fn unsat_and_count() {
    let o = twistc(&["solve", &corpus("unsat.tw")], "");
    assert_eq!((o.code, o.stdout.as_str()), (exit::UNSAT, "unsat\n"));
    let o = twistc(&["count", "-", "--limit", "100"], "exact 2, $i in (1..4): P($i) end");
    assert_eq!((o.code, o.stdout.as_str()), (exit::OK, "6\n"));
    let o = twistc(&["count", "-", "--limit", "4"], "exact 2, $i in (1..4): P($i) end");
    assert_eq!(o.stdout, "4\n");
    assert!(o.stderr.contains("limit of 4 reached"));
}

#[test]
fn json_output_follows_schema() {
    let o = twistc(&["solve", "-", "--limit", "10", "--json"], "p or q");
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    schema_check(&v);
    assert_eq!(v["status"], "sat");
    assert_eq!(v["exhausted"], true);
    assert_eq!(v["models"].as_array().unwrap().len(), 3);
    assert_eq!(v["models"][0]["rows"][0]["atom"], "p");

    let o = twistc(&["solve", "-", "--json"], "p and not p");
    assert_eq!(o.code, exit::UNSAT);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    schema_check(&v);
    assert_eq!(v["status"], "unsat");

    let o = twistc(&["solve", "-", "--json", "--false-only", "--filter", "^b"], "a and not b and not c");
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    schema_check(&v);
    assert_eq!(v["models"][0]["rows"], serde_json::json!([{"atom": "b", "value": false}]));
}

#[test]
fn smt_programs() {
    let o = twistc(&["dimacs", &corpus("kamaji_sum.tw")], "");
    assert_eq!(o.code, exit::USER);
    assert!(o.stderr.contains("smt2"));
    let o = twistc(&["smt2", &corpus("kamaji_sum.tw")], "");
    assert_eq!(o.code, exit::OK);
    assert!(o.stdout.contains("(set-logic QF_LIA)"));
    assert!(o.stdout.ends_with("(check-sat)\n(get-model)\n"));
    let o = twistc(&["smt2", &corpus("pqor.tw")], "");
    assert_eq!(o.code, exit::USER);
    let o = twistc(&["smt2", "--force", &corpus("pqor.tw")], "");
    assert!(o.stdout.contains("(set-logic QF_UF)"));
}

#[test]
fn smt_solver_failures() {
    let kamaji = corpus("kamaji_sum.tw");
    let o = twistc(&["solve", &kamaji, "--smt-cmd", "no-such-solver-anywhere"], "");
    assert_eq!(o.code, exit::IO, "{}", o.stderr);
    let o = twistc(&["solve", &kamaji, "--smt-cmd", "echo unknown"], "");
    assert_eq!((o.code, o.stdout.as_str()), (exit::UNKNOWN, "unknown\n"));
    let o = twistc(&["solve", &kamaji, "--smt-cmd", "sleep 10", "--timeout", "1"], "");
    assert_eq!(o.code, exit::UNKNOWN);
}

#[test]
fn external_sat_solver() {
    // A fake solver answering with the model p=false, q=true, then unsat
    // once a blocking clause is present.
    let script = r#"sh -c 'if grep -q "^-2 0$\|^1 -2 0$\|^-2 1 0$" "$0"; then echo "s UNSATISFIABLE"; else printf "s SATISFIABLE\nv -1 2 0\n"; fi' {file}"#;
    let o = twistc(&["solve", "-", "--sat-cmd", script, "--limit", "5"], "p or q\nnot p");
    assert_eq!(o.code, exit::OK, "{}", o.stderr);
    assert_eq!(o.stdout, "# model 1\np = false\nq = true\n");
    let o = twistc(&["solve", "-", "--sat-cmd", "echo garbage"], "p");
    assert_eq!(o.code, exit::IO);
}

#[test]
fn usage() {
    let o = twistc(&["--help"], "");
    assert_eq!(o.code, exit::OK);
    assert!(o.stdout.contains("solve"));
    let o = twistc(&["--version"], "");
    assert_eq!(o.code, exit::OK);
    let o = twistc(&[], "");
    assert_eq!(o.code, exit::USER);
    let o = twistc(&["solve", "-", "--limit", "0"], "p");
    assert_eq!(o.code, exit::USER);
    let o = twistc(&["solve", "-", "--true-only", "--false-only"], "p");
    assert_eq!(o.code, exit::USER);
    assert!(o.stderr.contains("cannot be used with"));
    let o = twistc(&["count", "-"], "p");
    assert_eq!(o.code, exit::USER);
}

#[test]
fn latex_and_check() {
    let o = twistc(&["latex", &corpus("chain.tw")], "");
    assert_eq!(o.code, exit::OK);
    assert!(o.stdout.contains("\\bigwedge"), "{}", o.stdout);
    let o = twistc(&["check", &corpus("sudoku.tw")], "");
    assert_eq!(o.stdout, "ok: 729 atoms, 12005 clauses, 729 variables\n");
}
