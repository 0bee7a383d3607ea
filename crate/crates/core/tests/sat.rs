//! CDCL solver and enumeration against brute force and DPLL.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twist_core::card::CardEncoding;
use twist_core::cnf::{tseitin, ClauseDb};
use twist_core::ground::ground;
use twist_core::parse;
use twist_core::sat::{count_models, solve, NextModel, Session, SolveOutcome, SolverConfig};
use twist_testkit::formulas::{pigeonhole, random_formula, random_kcnf};
use twist_testkit::checks::{enumeration_matches, random_3cnf_counts};
use twist_testkit::dpll;

fn db_of(src: &str) -> ClauseDb {
    tseitin(&ground(&parse(src).unwrap()).unwrap(), CardEncoding::Auto).unwrap()
}

fn count(src: &str) -> usize {
    count_models(&db_of(src), 1_000_000, SolverConfig::default()).unwrap().unwrap()
}

#[test]
fn documented_counts() {
    assert_eq!(count("exact 2, $i in (1..4): P($i) end"), 6);
    assert_eq!(count("p or q"), 3);
    assert_eq!(count("p and not p"), 0);
    assert_eq!(count_models(&db_of("p"), 10, SolverConfig::default()).unwrap(), Some(1));
    assert_eq!(count_models(&db_of("p or not p"), 10, SolverConfig::default()).unwrap(), Some(2));
}

#[test]
fn unsat_input_has_no_models() {
    let mut s = Session::new(&db_of("p and not p"), SolverConfig::default());
    assert_eq!(s.next_model().unwrap(), NextModel::Exhausted);
    assert_eq!(s.models_served(), 0);
}

#[test]
fn random_8_var_3cnf_counts() {
    random_3cnf_counts(200, 3).unwrap();
}

#[test]
fn agrees_with_dpll_near_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..150 {
        let cs = random_kcnf(&mut rng, 40, 170, 3);
        let db = ClauseDb::from_clauses(40, cs.clone());
        let ours = solve(&db, &[]).unwrap();
        let theirs = dpll::solve(&cs, 40);
        match ours {
            SolveOutcome::Sat(m) => {
                assert!(theirs.is_some());
                assert!(cs.iter().all(|c| c.iter().any(|&l| m.lit(l))));
                sat += 1;
            }
            SolveOutcome::Unsat => {
                assert!(theirs.is_none());
                unsat += 1;
            }
            SolveOutcome::Unknown => panic!("budget exhausted on a 40-variable instance"),
        }
    }
    assert!(sat > 10 && unsat > 10, "{sat} sat / {unsat} unsat");
}

#[test]
fn assumptions_match_dpll_units() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let cs = random_kcnf(&mut rng, 12, 40, 3);
        let db = ClauseDb::from_clauses(12, cs.clone());
        let assume = [1, -2, 3];
        let ours = matches!(solve(&db, &assume).unwrap(), SolveOutcome::Sat(_));
        assert_eq!(ours, dpll::solve_with(&cs, 12, &assume).is_some());
    }
}

pub fn pigeonhole_unsat(max_n: usize) -> Result<(), String> {
    for n in 1..=max_n {
        let (vars, cs) = pigeonhole(n);
        match solve(&ClauseDb::from_clauses(vars, cs), &[]).map_err(|e| e.to_string())? {
            SolveOutcome::Unsat => {}
            other => return Err(format!("PHP({}, {n}) gave {other:?}", n + 1)),
        }
    }
    Ok(())
}

#[test]
fn pigeonhole_up_to_six() {
    pigeonhole_unsat(6).unwrap();
}

#[test]
fn enumeration_is_complete_and_distinct() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..300 {
        let g = random_formula(&mut rng, 6, 4);
        let enc = if i % 2 == 0 { CardEncoding::Binomial } else { CardEncoding::SeqCounter };
        enumeration_matches(&g, enc).unwrap();
    }
}

#[test]
fn enumeration_over_ten_atoms() {
    let g = ground(
        &parse("atmost 3, $i in (1..10): P($i) end and bigor $i in (1..9): P($i) and P($i + 1) end")
            .unwrap(),
    )
    .unwrap();
    for enc in [CardEncoding::Binomial, CardEncoding::SeqCounter] {
        enumeration_matches(&g, enc).unwrap();
    }
}

#[test]
fn fixed_seed_fixed_sequence() {
    let db = db_of("bigor $i in (1..5): P($i) end and atmost 2, $i in (1..5): P($i) end");
    let run = |seed| {
        let cfg = SolverConfig { seed, ..SolverConfig::default() };
        let mut s = Session::new(&db, cfg);
        let mut out = Vec::new();
        while let NextModel::Model(m) = s.next_model().unwrap() {
            out.push(m.values);
        }
        out
    };
    let a = run(42);
    assert_eq!(a.len(), 15);
    assert_eq!(a, run(42));
}

#[test]
fn tiny_budget_reports_unknown() {
    let (vars, cs) = pigeonhole(7);
    let cfg = SolverConfig { conflict_budget: 10, ..SolverConfig::default() };
    let db = ClauseDb::from_clauses(vars, cs);
    assert_eq!(twist_core::sat::solver_for(&db, cfg).solve(&[]).unwrap(), SolveOutcome::Unknown);
}
