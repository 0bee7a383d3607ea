//! Round trips through a real z3 binary. Skipped when z3 is not installed.

use std::process::Command;

use twist_core::card::CardEncoding;
use twist_core::ground::ground;
use twist_core::parse;
use twist_core::smt::{check_model, emit, SmtNext, SmtOutcome, SmtSession, SmtSolver};

fn z3() -> Option<SmtSolver> {
    let ok = Command::new("z3").arg("-version").output().map(|o| o.status.success()).unwrap_or(false);
    if !ok {
        eprintln!("z3 not found; skipping");
        return None;
    }
    Some(SmtSolver::new("z3 -in"))
}

fn run(src: &str) -> Option<(twist_core::ground::GroundFormula, SmtOutcome)> {
    let solver = z3()?;
    let g = ground(&parse(src).unwrap()).unwrap();
    let script = emit(&g, CardEncoding::Auto, true).unwrap();
    Some((g, solver.run(&script.text()).unwrap()))
}

#[test]
fn difference_constraints_sat() {
    let Some((g, out)) = run("real tau\ntau(a) < tau(b) and tau(b) < tau(c) and tau(c) - tau(a) <= 1.5") else {
        return;
    };
    let SmtOutcome::Sat(m) = out else { panic!("{out:?}") };
    assert!(check_model(&g, &m).unwrap());
}

#[test]
fn difference_cycle_unsat() {
    let Some((_, out)) = run("int t\nt(1) < t(2) and t(2) < t(3) and t(3) < t(1)") else {
        return;
    };
    assert_eq!(out, SmtOutcome::Unsat);
}

#[test]
fn linear_sum_with_props() {
    let src = "int x\n(p => x(1) + x(2) == 5) and p and x(1) >= 3 and x(2) >= 2";
    let Some((g, out)) = run(src) else { return };
    let SmtOutcome::Sat(m) = out else { panic!("{out:?}") };
    assert!(check_model(&g, &m).unwrap());
    assert_eq!(m.nums["x_1"].to_string(), "3");
}

#[test]
fn cardinality_inside_smt_counts_exactly() {
    // exact 2 of 4 under a theory side condition: C(4,2) = 6 projected models.
    for enc in [CardEncoding::Binomial, CardEncoding::SeqCounter] {
        let Some(solver) = z3() else { return };
        let src = "int x\nexact 2, $i in (1..4): P($i) end and x(1) > 0";
        let g = ground(&parse(src).unwrap()).unwrap();
        let script = emit(&g, enc, false).unwrap();
        let mut s = SmtSession::new(solver, g, script);
        let mut n = 0;
        loop {
            match s.next_model().unwrap() {
                SmtNext::Model(_) => n += 1,
                SmtNext::Exhausted => break,
                SmtNext::Unknown => panic!("unknown"),
            }
        }
        assert_eq!(n, 6, "{enc}");
    }
}

#[test]
fn negated_cardinality() {
    // not atmost 1 of 3 means at least 2: 4 models.
    let Some(solver) = z3() else { return };
    let src = "int x\nnot (atmost 1, $i in (1..3): P($i) end) and x(1) > 0";
    let g = ground(&parse(src).unwrap()).unwrap();
    let script = emit(&g, CardEncoding::Auto, false).unwrap();
    let mut s = SmtSession::new(solver, g, script);
    let mut n = 0;
    while let SmtNext::Model(_) = s.next_model().unwrap() {
        n += 1;
    }
    assert_eq!(n, 4);
}
