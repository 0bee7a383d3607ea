//! Random ground formulas and clause sets.

use rand::Rng;
use twist_core::ast::CardKind;
use twist_core::ground::GroundFormula;

const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// Random formula over the first `n_atoms` atoms with depth at most `depth`.
/// Every connective appears, including cardinality nodes and constants.
pub fn random_formula(rng: &mut impl Rng, n_atoms: usize, depth: usize) -> GroundFormula {
    assert!((1..=NAMES.len()).contains(&n_atoms));
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => GroundFormula::True,
            1 => GroundFormula::False,
            _ => GroundFormula::Lit(
                twist_core::ground::GroundAtom::new(NAMES[rng.gen_range(0..n_atoms)], vec![]),
                rng.gen_bool(0.7),
            ),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, n_atoms, depth - 1);
    match rng.gen_range(0..7) {
        0 => GroundFormula::Not(Box::new(sub(rng))),
        1 => GroundFormula::And((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        2 => GroundFormula::Or((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        3 => GroundFormula::Impl(Box::new(sub(rng)), Box::new(sub(rng))),
        4 => GroundFormula::Iff(Box::new(sub(rng)), Box::new(sub(rng))),
        _ => {
            let n = rng.gen_range(2..=4);
            let kind = [CardKind::AtLeast, CardKind::AtMost, CardKind::Exact][rng.gen_range(0..3)];
            GroundFormula::Card {
                kind,
                k: rng.gen_range(1..n as i64),
                lits: (0..n).map(|_| sub(rng)).collect(),
            }
        }
    }
}

/// Random k-CNF over variables `1..=n`.
pub fn random_kcnf(rng: &mut impl Rng, n: usize, m: usize, k: usize) -> Vec<Vec<i32>> {
    (0..m)
        .map(|_| {
            let mut c: Vec<i32> = Vec::with_capacity(k);
            while c.len() < k {
                let v = rng.gen_range(1..=n as i32);
                if c.iter().any(|l| l.abs() == v) {
                    continue;
                }
                c.push(if rng.gen_bool(0.5) { v } else { -v });
            }
            c
        })
        .collect()
}

/// Pigeonhole PHP(n+1, n): unsatisfiable for every n.
pub fn pigeonhole(n: usize) -> (usize, Vec<Vec<i32>>) {
    let pigeons = n + 1;
    let var = |i: usize, j: usize| (i * n + j + 1) as i32;
    let mut cs: Vec<Vec<i32>> = (0..pigeons).map(|i| (0..n).map(|j| var(i, j)).collect()).collect();
    for j in 0..n {
        for a in 0..pigeons {
            for b in a + 1..pigeons {
                cs.push(vec![-var(a, j), -var(b, j)]);
            }
        }
    }
    (pigeons * n, cs)
}
