//! Checks that drive `twist-core` against the oracles of this crate. The
//! integration tests and the acceptance suite share them, so each property
//! is stated once.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twist_core::ast::CardKind;
use twist_core::card::{encode_atleast, encode_atmost, encode_exact, CardEncoding, SimpleAlloc};
use twist_core::cnf::{tseitin, ClauseDb};
use twist_core::ground::{ground, GroundFormula};
use twist_core::parse;
use twist_core::sat::{count_models, NextModel, Session, SolverConfig};

use crate::formulas::{random_formula, random_kcnf};
use crate::programs::{generate, Limits};
use crate::{dpll, truth};

/// `n` random programs: the ground formula and the direct evaluator agree
/// on every assignment of the atoms either side mentions.
pub fn grounder_oracle(n: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..n {
        let prog = generate(&mut rng, Limits::default());
        let src = prog.source();
        let ast = parse(&src).map_err(|d| format!("case {case}: parse failed: {d:?}\n{src}"))?;
        let g = ground(&ast).map_err(|e| format!("case {case}: ground failed: {e}\n{src}"))?;
        let mut names: BTreeSet<String> = prog.universe().into_iter().collect();
        names.extend(truth::atoms(&g));
        let names: Vec<String> = names.into_iter().collect();
        for mask in 0..1u64 << names.len() {
            let a = truth::assignment(&names, mask);
            if prog.eval(&a) != truth::eval(&g, &a) {
                return Err(format!("case {case}: disagreement at {a:?}\n{src}\nground: {g}"));
            }
        }
    }
    Ok(())
}

/// Clauses and variable count for `kind k` over literals `1..=n`.
pub fn encode_card(kind: CardKind, k: usize, n: usize, enc: CardEncoding) -> (Vec<Vec<i32>>, usize) {
    let lits: Vec<i32> = (1..=n as i32).collect();
    let mut alloc = SimpleAlloc::after(n as i32);
    let cs = match kind {
        CardKind::AtMost => encode_atmost(&lits, k, enc, &mut alloc),
        CardKind::AtLeast => encode_atleast(&lits, k, enc, &mut alloc),
        CardKind::Exact => encode_exact(&lits, k, enc, &mut alloc),
    };
    (cs, alloc.next as usize)
}

/// For both encodings, every kind, `n <= max_n` and `k <= n`, the
/// projected model set equals the count-constrained set.
pub fn cardinality(max_n: usize) -> Result<(), String> {
    for enc in [CardEncoding::Binomial, CardEncoding::SeqCounter] {
        for kind in [CardKind::AtMost, CardKind::AtLeast, CardKind::Exact] {
            for n in 0..=max_n {
                for k in 0..=n {
                    let (cs, n_vars) = encode_card(kind, k, n, enc);
                    for mask in 0u32..1 << n {
                        let units: Vec<i32> = (1..=n as i32)
                            .map(|v| if mask >> (v - 1) & 1 == 1 { v } else { -v })
                            .collect();
                        let sat = dpll::solve_with(&cs, n_vars, &units).is_some();
                        let want = truth::card_holds(kind, k as i64, mask.count_ones());
                        if sat != want {
                            return Err(format!("{enc} {} {k} of {n}: mask {mask:b} gives {sat}", kind.keyword()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// For every assignment of the user atoms, the CNF with those values fixed
/// is satisfiable exactly when the formula is true. This is both
/// directions of the projection property at once.
pub fn tseitin_projection(g: &GroundFormula, enc: CardEncoding) -> Result<(), String> {
    let db = tseitin(g, enc).map_err(|e| e.to_string())?;
    let names = truth::atoms(g);
    if db.n_user() != names.len() {
        return Err(format!("{} user atoms for {names:?}", db.n_user()));
    }
    let var_of: Vec<i32> = names.iter().map(|n| db.varmap.get(n).unwrap()).collect();
    for mask in 0..1u64 << names.len() {
        let units: Vec<i32> = var_of
            .iter()
            .enumerate()
            .map(|(i, &v)| if mask >> i & 1 == 1 { v } else { -v })
            .collect();
        let cnf = dpll::solve_with(&db.clauses, db.n_vars(), &units).is_some();
        let tt = truth::eval(g, &truth::assignment(&names, mask));
        if cnf != tt {
            return Err(format!("{g}: mask {mask:b} cnf={cnf} truth={tt}"));
        }
    }
    let sat_cnf = dpll::solve(&db.clauses, db.n_vars()).is_some();
    let sat_tt = !truth::models(g, &names).is_empty();
    if sat_cnf != sat_tt {
        return Err(format!("{g}: equisatisfiability fails"));
    }
    Ok(())
}

/// [`tseitin_projection`] on random formulas over at most 4 atoms and
/// depth at most 5, alternating encodings.
pub fn tseitin_random(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let g = random_formula(&mut rng, 4, 5);
        let enc = if i % 2 == 0 { CardEncoding::Binomial } else { CardEncoding::SeqCounter };
        tseitin_projection(&g, enc).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(())
}

/// Model counts of random 8-variable 3-CNF against brute force.
pub fn random_3cnf_counts(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let m = 10 + i % 30;
        let cs = random_kcnf(&mut rng, 8, m, 3);
        let want = truth::count_cnf(&cs, 8);
        let got = count_models(&ClauseDb::from_clauses(8, cs.clone()), 1000, SolverConfig::default())
            .map_err(|e| e.to_string())?
            .ok_or("unknown")?;
        if got != want {
            return Err(format!("{cs:?}: counted {got}, brute force {want}"));
        }
    }
    Ok(())
}

/// Enumerated projected models equal the truth-table models, each once.
pub fn enumeration_matches(g: &GroundFormula, enc: CardEncoding) -> Result<(), String> {
    let db = tseitin(g, enc).map_err(|e| e.to_string())?;
    let names = truth::atoms(g);
    let vars: Vec<i32> = names.iter().map(|n| db.varmap.get(n).unwrap()).collect();
    let want = truth::models(g, &names);
    let mut got = BTreeSet::new();
    let mut s = Session::new(&db, SolverConfig::default());
    loop {
        match s.next_model().map_err(|e| e.to_string())? {
            NextModel::Model(m) => {
                let mask = vars
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &v)| acc | (m.lit(v) as u64) << i);
                if !got.insert(mask) {
                    return Err(format!("{g}: model {mask:b} repeated"));
                }
            }
            NextModel::Exhausted => break,
            NextModel::Unknown => return Err("unknown".into()),
        }
    }
    if got != want {
        return Err(format!("{g}: enumerated {got:?}, truth table {want:?}"));
    }
    Ok(())
}
