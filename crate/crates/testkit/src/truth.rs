//! Truth-table evaluation of ground formulas.

use std::collections::{BTreeSet, HashMap};

use twist_core::ast::CardKind;
use twist_core::ground::GroundFormula;

/// Sorted distinct atom texts.
pub fn atoms(g: &GroundFormula) -> Vec<String> {
    fn walk(g: &GroundFormula, out: &mut BTreeSet<String>) {
        use GroundFormula::*;
        match g {
            True | False => {}
            Lit(a, _) => {
                out.insert(a.text());
            }
            Not(x) => walk(x, out),
            And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().for_each(|x| walk(x, out)),
            Impl(a, b) | Iff(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Theory { .. } => panic!("theory atom in a truth table"),
        }
    }
    let mut s = BTreeSet::new();
    walk(g, &mut s);
    s.into_iter().collect()
}

pub fn eval(g: &GroundFormula, val: &HashMap<String, bool>) -> bool {
    use GroundFormula::*;
    match g {
        True => true,
        False => false,
        Lit(a, pol) => val.get(&a.text()).copied().unwrap_or(false) == *pol,
        Not(x) => !eval(x, val),
        And(xs) => xs.iter().all(|x| eval(x, val)),
        Or(xs) => xs.iter().any(|x| eval(x, val)),
        Impl(a, b) => !eval(a, val) || eval(b, val),
        Iff(a, b) => eval(a, val) == eval(b, val),
        Card { kind, k, lits } => {
            let n = lits.iter().filter(|x| eval(x, val)).count() as i64;
            match kind {
                CardKind::AtLeast => n >= *k,
                CardKind::AtMost => n <= *k,
                CardKind::Exact => n == *k,
            }
        }
        Theory { .. } => panic!("theory atom in a truth table"),
    }
}

/// Assignment of `names` given by the bits of `mask` (bit i is names[i]).
pub fn assignment(names: &[String], mask: u64) -> HashMap<String, bool> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), mask >> i & 1 == 1))
        .collect()
}

/// Masks over `names` of every satisfying assignment.
pub fn models(g: &GroundFormula, names: &[String]) -> BTreeSet<u64> {
    assert!(names.len() <= 20, "truth table too large");
    (0..1u64 << names.len())
        .filter(|&m| eval(g, &assignment(names, m)))
        .collect()
}

/// Whether `count` true literals satisfy the constraint.
pub fn card_holds(kind: CardKind, k: i64, count: u32) -> bool {
    let c = count as i64;
    match kind {
        CardKind::AtLeast => c >= k,
        CardKind::AtMost => c <= k,
        CardKind::Exact => c == k,
    }
}

/// Brute-force model count of a clause set over variables `1..=n`.
pub fn count_cnf(clauses: &[Vec<i32>], n: usize) -> usize {
    assert!(n <= 24);
    (0..1u64 << n)
        .filter(|&m| {
            clauses
                .iter()
                .all(|c| c.iter().any(|&l| (m >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
        })
        .count()
}
