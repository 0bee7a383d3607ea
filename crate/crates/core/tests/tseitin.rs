//! Clause generation: equisatisfiability, projection and DIMACS text.

use proptest::prelude::*;
use twist_core::card::CardEncoding;
use twist_core::cnf::{emit_dimacs, parse_dimacs, tseitin, ClauseDb};
use twist_core::ground::ground;
use twist_core::parse;
use twist_testkit::checks::{tseitin_projection, tseitin_random};
use twist_testkit::truth;

#[test]
fn thousand_random_formulas() {
    tseitin_random(1000, 7).unwrap();
}

#[test]
fn or_of_and_uses_one_definition() {
    let g = ground(&parse("p or (q and r)").unwrap()).unwrap();
    let db = tseitin(&g, CardEncoding::Auto).unwrap();
    assert_eq!(db.n_vars(), 4);
    let mut cs = db.clauses.clone();
    cs.iter_mut().for_each(|c| c.sort());
    cs.sort();
    // p=1 q=2 r=3 t=4: (p or t), (not t or q), (not t or r)
    assert_eq!(cs, vec![vec![-4, 2], vec![-4, 3], vec![1, 4]]);
    tseitin_projection(&g, CardEncoding::Auto).unwrap();
}

#[test]
fn mini_sudoku_matches_truth_table() {
    // 2x2 grid, symbols 1..2: one symbol per cell, each symbol once per row
    // and column.
    let src = "$N = (1..2)
bigand $r in $N, $c in $N: exact 1, $v in $N: S($r, $c, $v) end end
bigand $r in $N, $v in $N: atmost 1, $c in $N: S($r, $c, $v) end end
bigand $c in $N, $v in $N: atmost 1, $r in $N: S($r, $c, $v) end end
S(1, 1, 1)";
    let g = ground(&parse(src).unwrap()).unwrap();
    for enc in [CardEncoding::Binomial, CardEncoding::SeqCounter] {
        tseitin_projection(&g, enc).unwrap();
    }
    let names = truth::atoms(&g);
    assert_eq!(names.len(), 8);
    assert_eq!(truth::models(&g, &names).len(), 1);
}

#[test]
fn dimacs_layout() {
    let db = ClauseDb::from_clauses(2, vec![vec![1], vec![2]]);
    let text = emit_dimacs(&db, true);
    assert!(text.ends_with("p cnf 2 2\n1 0\n2 0\n"), "{text}");
    assert_eq!(emit_dimacs(&db, false), "p cnf 2 2\n1 0\n2 0\n");
    let empty = ClauseDb::from_clauses(3, vec![]);
    assert_eq!(emit_dimacs(&empty, false), "p cnf 3 0\n");
}

#[test]
fn xor_dimacs() {
    let g = ground(&parse("exact 1, $x in (p, q): X($x) end").unwrap()).unwrap();
    let db = tseitin(&g, CardEncoding::Auto).unwrap();
    assert_eq!(
        emit_dimacs(&db, true),
        "c X(p) = 1\nc X(q) = 2\np cnf 2 2\n1 2 0\n-1 -2 0\n"
    );
}

fn clause_sets() -> impl Strategy<Value = (usize, Vec<Vec<i32>>)> {
    (1usize..12).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        (Just(n), prop::collection::vec(prop::collection::vec(lit, 0..5), 0..20))
    })
}

proptest! {
    #[test]
    fn dimacs_round_trip((n, clauses) in clause_sets(), comments in any::<bool>()) {
        let db = ClauseDb::from_clauses(n, clauses);
        let text = emit_dimacs(&db, comments);
        let back = parse_dimacs(&text).unwrap();
        prop_assert_eq!(&back.clauses, &db.clauses);
        prop_assert_eq!(back.n_vars(), db.n_vars());
        prop_assert_eq!(emit_dimacs(&back, comments), text);
    }
}
