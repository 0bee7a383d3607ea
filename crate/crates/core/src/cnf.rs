//! Tseitin transformation to CNF, variable numbering and DIMACS text.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::ast::CardKind;
use crate::card::{self, CardEncoding, VarAlloc};
use crate::ground::{normalize_card, GroundFormula};

/// Bidirectional map between DIMACS variables and atom names. User atoms
/// occupy `1..=n_user`; generated variables follow.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarMap {
    forward: HashMap<String, i32>,
    backward: Vec<String>,
    n_user: usize,
}

impl VarMap {
    pub fn get(&self, name: &str) -> Option<i32> {
        self.forward.get(name).copied()
    }

    /// Name of variable `v` (1-based).
    pub fn name(&self, v: i32) -> &str {
        &self.backward[v as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn n_user(&self) -> usize {
        self.n_user
    }

    pub fn is_user(&self, v: i32) -> bool {
        v >= 1 && v as usize <= self.n_user
    }

    /// `(var, name)` for every user atom, ascending.
    pub fn user_atoms(&self) -> impl Iterator<Item = (i32, &str)> {
        self.backward[..self.n_user]
            .iter()
            .enumerate()
            .map(|(i, s)| (i as i32 + 1, s.as_str()))
    }

    /// Adds a user atom. Panics once a generated variable exists.
    pub fn add_user(&mut self, name: &str) -> i32 {
        if let Some(v) = self.get(name) {
            return v;
        }
        assert_eq!(self.n_user, self.backward.len(), "user atoms must come first");
        self.n_user += 1;
        self.push(name.to_string())
    }

    pub fn add_generated(&mut self, name: String) -> i32 {
        self.push(name)
    }

    fn push(&mut self, name: String) -> i32 {
        self.backward.push(name.clone());
        let v = self.backward.len() as i32;
        self.forward.insert(name, v);
        v
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClauseDb {
    pub clauses: Vec<Vec<i32>>,
    pub varmap: VarMap,
}

impl ClauseDb {
    /// A database over user variables `x1..xn` (for tests and DIMACS input).
    pub fn from_clauses(n_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        let mut varmap = VarMap::default();
        for i in 1..=n_vars {
            varmap.add_user(&format!("x{i}"));
        }
        ClauseDb { clauses, varmap }
    }

    pub fn n_vars(&self) -> usize {
        self.varmap.len()
    }

    pub fn n_user(&self) -> usize {
        self.varmap.n_user()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("theory atom '{0}' cannot be translated to CNF; use SMT-LIB output instead")]
    TheoryAtom(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pol {
    Pos,
    Neg,
    Both,
}

impl Pol {
    fn flip(self) -> Pol {
        match self {
            Pol::Pos => Pol::Neg,
            Pol::Neg => Pol::Pos,
            Pol::Both => Pol::Both,
        }
    }

    fn pos(self) -> bool {
        self != Pol::Neg
    }

    fn neg(self) -> bool {
        self != Pol::Pos
    }
}

/// Polarity with which a cardinality node's children occur.
fn card_child_pol(kind: CardKind) -> Pol {
    match kind {
        CardKind::AtLeast => Pol::Pos,
        CardKind::AtMost => Pol::Neg,
        CardKind::Exact => Pol::Both,
    }
}

/// Equisatisfiable CNF of a propositional ground formula.
pub fn tseitin(g: &GroundFormula, enc: CardEncoding) -> Result<ClauseDb, CnfError> {
    if let Some(t) = find_theory(g) {
        return Err(CnfError::TheoryAtom(t));
    }
    let mut b = Builder {
        varmap: VarMap::default(),
        clauses: Vec::new(),
        enc,
        n_defs: 0,
        n_cards: 0,
    };
    g.for_each_atom(&mut |a| {
        b.varmap.add_user(&a.text());
    });
    let s = simplify(g.clone());
    b.assert_top(&s);
    Ok(ClauseDb {
        clauses: b.clauses,
        varmap: b.varmap,
    })
}

fn find_theory(g: &GroundFormula) -> Option<String> {
    use GroundFormula::*;
    match g {
        Theory { .. } => Some(g.to_string()),
        True | False | Lit(..) => None,
        Not(x) => find_theory(x),
        And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().find_map(find_theory),
        Impl(a, b) | Iff(a, b) => find_theory(a).or_else(|| find_theory(b)),
    }
}

/// Folds constants and double negations; nested conjunctions and
/// disjunctions are flattened. Constants survive only at the root.
pub fn simplify(g: GroundFormula) -> GroundFormula {
    use GroundFormula::*;
    match g {
        True | False | Lit(..) | Theory { .. } => g,
        Not(x) => match simplify(*x) {
            Not(y) => *y,
            other => other.negate(),
        },
        And(xs) => {
            let mut out = Vec::with_capacity(xs.len());
            for x in xs {
                match simplify(x) {
                    True => {}
                    False => return False,
                    And(ys) => out.extend(ys),
                    y => out.push(y),
                }
            }
            match out.len() {
                0 => True,
                1 => out.pop().unwrap(),
                _ => And(out),
            }
        }
        Or(xs) => {
            let mut out = Vec::with_capacity(xs.len());
            for x in xs {
                match simplify(x) {
                    False => {}
                    True => return True,
                    Or(ys) => out.extend(ys),
                    y => out.push(y),
                }
            }
            match out.len() {
                0 => False,
                1 => out.pop().unwrap(),
                _ => Or(out),
            }
        }
        Impl(a, b) => match (simplify(*a), simplify(*b)) {
            (False, _) | (_, True) => True,
            (True, b) => b,
            (a, False) => a.negate(),
            (a, b) => Impl(Box::new(a), Box::new(b)),
        },
        Iff(a, b) => match (simplify(*a), simplify(*b)) {
            (True, x) | (x, True) => x,
            (False, x) | (x, False) => x.negate(),
            (a, b) => Iff(Box::new(a), Box::new(b)),
        },
        Card { kind, k, lits } => {
            let mut k = k;
            let mut rest = Vec::with_capacity(lits.len());
            for x in lits {
                match simplify(x) {
                    True => k -= 1,
                    False => {}
                    y => rest.push(y),
                }
            }
            match normalize_card(kind, k, rest) {
                c @ Card { .. } => c,
                other => simplify(other),
            }
        }
    }
}

/// Pushes one negation into the root connective.
fn push_not(g: GroundFormula) -> GroundFormula {
    use GroundFormula::*;
    match g {
        And(xs) => Or(xs.into_iter().map(GroundFormula::negate).collect()),
        Or(xs) => And(xs.into_iter().map(GroundFormula::negate).collect()),
        Impl(a, b) => And(vec![*a, b.negate()]),
        Iff(a, b) => Iff(a, Box::new(b.negate())),
        Not(x) => *x,
        Card { kind, k, lits } => card_complement(kind, k, lits),
        other => other.negate(),
    }
}

fn card_complement(kind: CardKind, k: i64, lits: Vec<GroundFormula>) -> GroundFormula {
    match kind {
        CardKind::AtLeast => normalize_card(CardKind::AtMost, k - 1, lits),
        CardKind::AtMost => normalize_card(CardKind::AtLeast, k + 1, lits),
        CardKind::Exact => simplify(GroundFormula::Or(vec![
            normalize_card(CardKind::AtMost, k - 1, lits.clone()),
            normalize_card(CardKind::AtLeast, k + 1, lits),
        ])),
    }
}

struct Builder {
    varmap: VarMap,
    clauses: Vec<Vec<i32>>,
    enc: CardEncoding,
    n_defs: usize,
    n_cards: usize,
}

impl VarAlloc for Builder {
    fn alloc(&mut self, name: String) -> i32 {
        self.varmap.add_generated(name)
    }

    fn next_constraint_id(&mut self) -> usize {
        self.n_cards += 1;
        self.n_cards
    }
}

impl Builder {
    fn fresh_def(&mut self) -> i32 {
        self.n_defs += 1;
        let name = format!("_T{}", self.n_defs);
        self.varmap.add_generated(name)
    }

    fn add(&mut self, clause: Vec<i32>) {
        let mut out: Vec<i32> = Vec::with_capacity(clause.len());
        for l in clause {
            if out.contains(&-l) {
                return;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        self.clauses.push(out);
    }

    fn assert_top(&mut self, g: &GroundFormula) {
        use GroundFormula::*;
        match g {
            True => {}
            False => {
                let t = self.fresh_def();
                self.add(vec![t]);
                self.add(vec![-t]);
            }
            And(xs) => xs.iter().for_each(|x| self.assert_top(x)),
            Or(xs) => {
                let c = xs.iter().map(|x| self.lit(x, Pol::Pos)).collect();
                self.add(c);
            }
            Lit(..) => {
                let l = self.lit(g, Pol::Pos);
                self.add(vec![l]);
            }
            Not(x) => {
                let pushed = simplify(push_not((**x).clone()));
                self.assert_top(&pushed);
            }
            Impl(a, b) => {
                let la = self.lit(a, Pol::Neg);
                let lb = self.lit(b, Pol::Pos);
                self.add(vec![-la, lb]);
            }
            Iff(a, b) => {
                let la = self.lit(a, Pol::Both);
                let lb = self.lit(b, Pol::Both);
                self.add(vec![-la, lb]);
                self.add(vec![la, -lb]);
            }
            Card { kind, k, lits } => self.card(*kind, *k, lits, None),
            Theory { .. } => unreachable!("rejected before encoding"),
        }
    }

    /// Encodes a cardinality constraint; with `guard = Some(g)` every clause
    /// also contains `g`, so the constraint only binds when `g` is false.
    fn card(&mut self, kind: CardKind, k: i64, lits: &[GroundFormula], guard: Option<i32>) {
        let pol = card_child_pol(kind);
        let xs: Vec<i32> = lits.iter().map(|x| self.lit(x, pol)).collect();
        let n = xs.len() as i64;
        debug_assert!((0..=n).contains(&k));
        let k = k.clamp(0, n) as usize;
        let enc = self.enc;
        let cls = match kind {
            CardKind::AtLeast => card::encode_atleast(&xs, k, enc, self),
            CardKind::AtMost => card::encode_atmost(&xs, k, enc, self),
            CardKind::Exact => card::encode_exact(&xs, k, enc, self),
        };
        for mut c in cls {
            if let Some(g) = guard {
                c.push(g);
            }
            self.add(c);
        }
    }

    /// Makes `guard ∨ f` hold.
    fn guarded(&mut self, f: &GroundFormula, guard: i32) {
        use GroundFormula::*;
        match f {
            True => {}
            False => self.add(vec![guard]),
            And(xs) => xs.iter().for_each(|x| self.guarded(x, guard)),
            Or(xs) => {
                let mut c: Vec<i32> = xs.iter().map(|x| self.lit(x, Pol::Pos)).collect();
                c.push(guard);
                self.add(c);
            }
            Card { kind, k, lits } => self.card(*kind, *k, lits, Some(guard)),
            _ => {
                let l = self.lit(f, Pol::Pos);
                self.add(vec![l, guard]);
            }
        }
    }

    /// A literal standing for `g`. With `Pos` the literal implies `g`; with
    /// `Neg`, `g` implies the literal; `Both` gives equivalence.
    fn lit(&mut self, g: &GroundFormula, pol: Pol) -> i32 {
        use GroundFormula::*;
        match g {
            Lit(a, p) => {
                let v = self.varmap.get(&a.text()).expect("atom numbered in pre-pass");
                if *p {
                    v
                } else {
                    -v
                }
            }
            Not(x) => -self.lit(x, pol.flip()),
            True | False => {
                let t = self.fresh_def();
                self.add(vec![if matches!(g, True) { t } else { -t }]);
                t
            }
            And(xs) => {
                let t = self.fresh_def();
                if pol.pos() {
                    for x in xs {
                        let l = self.lit(x, Pol::Pos);
                        self.add(vec![-t, l]);
                    }
                }
                if pol.neg() {
                    let mut c = vec![t];
                    for x in xs {
                        c.push(-self.lit(x, Pol::Neg));
                    }
                    self.add(c);
                }
                t
            }
            Or(xs) => {
                let t = self.fresh_def();
                if pol.pos() {
                    let mut c = vec![-t];
                    for x in xs {
                        c.push(self.lit(x, Pol::Pos));
                    }
                    self.add(c);
                }
                if pol.neg() {
                    for x in xs {
                        let l = self.lit(x, Pol::Neg);
                        self.add(vec![-l, t]);
                    }
                }
                t
            }
            Impl(a, b) => {
                let t = self.fresh_def();
                if pol.pos() {
                    let la = self.lit(a, Pol::Neg);
                    let lb = self.lit(b, Pol::Pos);
                    self.add(vec![-t, -la, lb]);
                }
                if pol.neg() {
                    let la = self.lit(a, Pol::Pos);
                    let lb = self.lit(b, Pol::Neg);
                    self.add(vec![la, t]);
                    self.add(vec![-lb, t]);
                }
                t
            }
            Iff(a, b) => {
                let t = self.fresh_def();
                let la = self.lit(a, Pol::Both);
                let lb = self.lit(b, Pol::Both);
                if pol.pos() {
                    self.add(vec![-t, -la, lb]);
                    self.add(vec![-t, la, -lb]);
                }
                if pol.neg() {
                    self.add(vec![t, la, lb]);
                    self.add(vec![t, -la, -lb]);
                }
                t
            }
            Card { kind, k, lits } => {
                let d = self.fresh_def();
                if pol.pos() {
                    self.card(*kind, *k, lits, Some(-d));
                }
                if pol.neg() {
                    let comp = card_complement(*kind, *k, lits.clone());
                    self.guarded(&comp, d);
                }
                d
            }
            Theory { .. } => unreachable!("rejected before encoding"),
        }
    }
}

// ---------------------------------------------------------------------------
// DIMACS

/// `c <atom> = <n>` for each user atom (unless `comments` is false), the
/// `p cnf` header, then one zero-terminated line per clause.
pub fn emit_dimacs(db: &ClauseDb, comments: bool) -> String {
    emit_dimacs_with(db, &[], comments)
}

/// Like [`emit_dimacs`] with extra clauses appended after the database's.
pub fn emit_dimacs_with(db: &ClauseDb, extra: &[Vec<i32>], comments: bool) -> String {
    let mut out = String::new();
    if comments {
        for (v, name) in db.varmap.user_atoms() {
            let _ = writeln!(out, "c {name} = {v}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", db.n_vars(), db.clauses.len() + extra.len());
    for c in db.clauses.iter().chain(extra) {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DIMACS line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// Parses DIMACS CNF. `c <name> = <n>` comments, when they cover `1..=k`
/// contiguously, name the user atoms; other variables are `_v<n>`.
pub fn parse_dimacs(text: &str) -> Result<ClauseDb, DimacsError> {
    let mut names: Vec<(i32, String)> = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| DimacsError {
            line: i + 1,
            message: m,
        };
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('c') {
            if let Some((name, num)) = rest.trim().rsplit_once(" = ") {
                if let Ok(v) = num.trim().parse::<i32>() {
                    names.push((v, name.trim().to_string()));
                }
            }
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(err(format!("bad header '{t}'")));
            }
            let v = f[1].parse().map_err(|_| err(format!("bad variable count '{}'", f[1])))?;
            let c = f[2].parse().map_err(|_| err(format!("bad clause count '{}'", f[2])))?;
            header = Some((v, c));
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(err("clause before the 'p cnf' header".into()));
        };
        for tok in t.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| err(format!("bad literal '{tok}'")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() as usize > n_vars {
                return Err(err(format!("literal {l} exceeds variable count {n_vars}")));
            } else {
                cur.push(l);
            }
        }
    }
    let Some((n_vars, n_clauses)) = header else {
        return Err(DimacsError {
            line: 0,
            message: "missing 'p cnf' header".into(),
        });
    };
    if !cur.is_empty() {
        clauses.push(cur);
    }
    if clauses.len() != n_clauses {
        return Err(DimacsError {
            line: 0,
            message: format!("header announces {n_clauses} clauses, found {}", clauses.len()),
        });
    }
    names.sort_by_key(|(v, _)| *v);
    let contiguous = names.iter().enumerate().all(|(i, (v, _))| *v == i as i32 + 1)
        && names.len() <= n_vars;
    let mut varmap = VarMap::default();
    let n_named = if contiguous { names.len() } else { 0 };
    for (_, name) in names.iter().take(n_named) {
        varmap.add_user(name);
    }
    if n_named == 0 {
        for i in 1..=n_vars {
            varmap.add_user(&format!("x{i}"));
        }
    } else {
        for i in n_named + 1..=n_vars {
            varmap.add_generated(format!("_v{i}"));
        }
    }
    Ok(ClauseDb { clauses, varmap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Scalar;

    fn a(name: &str) -> GroundFormula {
        GroundFormula::atom(name, vec![])
    }

    #[test]
    fn conjunction_needs_no_fresh_variables() {
        let db = tseitin(&GroundFormula::And(vec![a("p"), a("q")]), CardEncoding::Auto).unwrap();
        assert_eq!(db.clauses, vec![vec![1], vec![2]]);
        assert_eq!(db.n_vars(), 2);
    }

    #[test]
    fn or_of_and_gets_one_definition() {
        let g = GroundFormula::Or(vec![a("p"), GroundFormula::And(vec![a("q"), a("r")])]);
        let db = tseitin(&g, CardEncoding::Auto).unwrap();
        // p=1 q=2 r=3 t=4
        assert_eq!(db.varmap.name(4), "_T1");
        let mut got = db.clauses.clone();
        got.sort();
        let mut want = vec![vec![1, 4], vec![-4, 2], vec![-4, 3]];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn user_atoms_in_first_occurrence_order() {
        let g = GroundFormula::Impl(
            Box::new(GroundFormula::atom("Q", vec![Scalar::Int(2)])),
            Box::new(GroundFormula::Or(vec![a("b"), GroundFormula::atom("Q", vec![Scalar::Int(2)])])),
        );
        let db = tseitin(&g, CardEncoding::Auto).unwrap();
        let names: Vec<_> = db.varmap.user_atoms().map(|(_, n)| n.to_string()).collect();
        assert_eq!(names, ["Q(2)", "b"]);
    }

    #[test]
    fn theory_atoms_are_rejected() {
        let p = crate::parser::parse("int x\nformulas:\nx(1) > 0").unwrap();
        let g = crate::ground::ground(&p).unwrap();
        assert!(matches!(tseitin(&g, CardEncoding::Auto), Err(CnfError::TheoryAtom(_))));
    }

    #[test]
    fn false_root_is_unsat() {
        let db = tseitin(&GroundFormula::And(vec![a("p"), GroundFormula::False]), CardEncoding::Auto).unwrap();
        assert_eq!(db.n_user(), 1);
        assert_eq!(db.clauses, vec![vec![2], vec![-2]]);
    }

    #[test]
    fn dimacs_exact_text() {
        let db = ClauseDb::from_clauses(2, vec![vec![1], vec![2]]);
        assert_eq!(emit_dimacs(&db, false), "p cnf 2 2\n1 0\n2 0\n");
        assert_eq!(
            emit_dimacs(&db, true),
            "c x1 = 1\nc x2 = 2\np cnf 2 2\n1 0\n2 0\n"
        );
        let empty = ClauseDb::from_clauses(3, vec![]);
        assert_eq!(emit_dimacs(&empty, false), "p cnf 3 0\n");
    }

    #[test]
    fn dimacs_round_trip_keeps_names() {
        let g = GroundFormula::Or(vec![a("p"), GroundFormula::And(vec![a("q"), a("r")])]);
        let db = tseitin(&g, CardEncoding::Auto).unwrap();
        let back = parse_dimacs(&emit_dimacs(&db, true)).unwrap();
        assert_eq!(back.clauses, db.clauses);
        assert_eq!(back.n_vars(), db.n_vars());
        assert_eq!(back.n_user(), 3);
        assert_eq!(back.varmap.name(2), "q");
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
    }

    #[test]
    fn simplify_folds() {
        let g = GroundFormula::And(vec![
            GroundFormula::True,
            GroundFormula::Not(Box::new(GroundFormula::Not(Box::new(a("p"))))),
        ]);
        assert_eq!(simplify(g), a("p"));
        let card = GroundFormula::Card {
            kind: CardKind::AtMost,
            k: 1,
            lits: vec![GroundFormula::True, a("p"), a("q")],
        };
        assert_eq!(
            simplify(card),
            GroundFormula::And(vec![a("p").negate(), a("q").negate()])
        );
    }

    #[test]
    fn duplicate_literals_and_tautologies() {
        let g = GroundFormula::And(vec![
            GroundFormula::Or(vec![a("p"), a("p"), a("q")]),
            GroundFormula::Or(vec![a("p"), a("p").negate()]),
        ]);
        let db = tseitin(&g, CardEncoding::Auto).unwrap();
        assert_eq!(db.clauses, vec![vec![1, 2]]);
    }
}
