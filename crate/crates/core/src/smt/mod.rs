//! SMT-LIB 2 back end: logic selection, script emission, and model
//! re-checking for formulas with numeric theory atoms.

mod linear;
pub mod sexpr;
mod solver;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ast::{CardKind, CmpOp, NumSort};
use crate::card::{encode_atleast, encode_atmost, encode_exact, CardEncoding, Clause, VarAlloc};
use crate::ground::{GTerm, GroundFormula, TheoryVar};

pub use linear::{eval_term, linearize, Affine};
pub use solver::{parse_solver_output, SmtModel, SmtNext, SmtOutcome, SmtSession, SmtSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    QfIdl,
    QfRdl,
    QfLia,
    QfLra,
    /// Pure Boolean scripts emitted on request.
    QfUf,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::QfIdl => "QF_IDL",
            Logic::QfRdl => "QF_RDL",
            Logic::QfLia => "QF_LIA",
            Logic::QfLra => "QF_LRA",
            Logic::QfUf => "QF_UF",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmtError {
    #[error("formula has no theory atoms; use DIMACS output or force SMT-LIB output")]
    NoTheory,
    #[error("theory atoms mix int and real symbols ({0} and {1})")]
    MixedSorts(String, String),
    #[error("nonlinear term {0}")]
    Nonlinear(String),
    #[error("unsupported term {term}: {reason}")]
    Unsupported { term: String, reason: String },
    #[error("SMT solver: {0}")]
    Solver(String),
}

/// An emitted script plus the symbols it declares.
#[derive(Debug, Clone)]
pub struct SmtScript {
    pub logic: Logic,
    /// Declarations and the single assertion, without `check-sat`.
    pub body: String,
    /// Proposition texts in first-occurrence order.
    pub bool_atoms: Vec<String>,
    pub theory_vars: Vec<TheoryVar>,
}

impl SmtScript {
    /// The complete script, ending with `(check-sat)` and `(get-model)`.
    pub fn text(&self) -> String {
        format!("{}(check-sat)\n(get-model)\n", self.body)
    }
}

/// Theory variables in first-occurrence order, without duplicates.
pub fn theory_vars(g: &GroundFormula) -> Vec<TheoryVar> {
    fn term(t: &GTerm, seen: &mut HashSet<String>, out: &mut Vec<TheoryVar>) {
        match t {
            GTerm::Num(_) => {}
            GTerm::Var(v) => {
                if seen.insert(v.name.clone()) {
                    out.push(v.clone());
                }
            }
            GTerm::Bin(_, a, b) => {
                term(a, seen, out);
                term(b, seen, out);
            }
            GTerm::Sqrt(x) => term(x, seen, out),
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for_each_theory(g, &mut |_, l, r| {
        term(l, &mut seen, &mut out);
        term(r, &mut seen, &mut out);
    });
    out
}

fn for_each_theory(g: &GroundFormula, f: &mut impl FnMut(CmpOp, &GTerm, &GTerm)) {
    use GroundFormula::*;
    match g {
        True | False | Lit(..) => {}
        Theory { cmp, lhs, rhs } => f(*cmp, lhs, rhs),
        Not(x) => for_each_theory(x, f),
        And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().for_each(|x| for_each_theory(x, f)),
        Impl(a, b) | Iff(a, b) => {
            for_each_theory(a, f);
            for_each_theory(b, f);
        }
    }
}

/// Picks the smallest logic covering every theory atom. `None` means the
/// formula is purely propositional.
pub fn classify(g: &GroundFormula) -> Result<Option<Logic>, SmtError> {
    let vars = theory_vars(g);
    let Some(first) = vars.first() else {
        return Ok(None);
    };
    if let Some(other) = vars.iter().find(|v| v.sort != first.sort) {
        return Err(SmtError::MixedSorts(first.name.clone(), other.name.clone()));
    }
    let sort = first.sort;
    let mut difference = true;
    let mut err = None;
    for_each_theory(g, &mut |_, l, r| {
        if err.is_some() {
            return;
        }
        match atom_affine(l, r, sort) {
            Ok(a) => difference &= a.is_difference(),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Some(match (sort, difference) {
        (NumSort::Int, true) => Logic::QfIdl,
        (NumSort::Real, true) => Logic::QfRdl,
        (NumSort::Int, false) => Logic::QfLia,
        (NumSort::Real, false) => Logic::QfLra,
    }))
}

/// `lhs - rhs` as a linear form.
fn atom_affine(lhs: &GTerm, rhs: &GTerm, sort: NumSort) -> Result<Affine, SmtError> {
    let l = linearize(lhs, sort)?;
    let r = linearize(rhs, sort)?;
    Ok(l.sub(&r))
}

/// Symbol text, with `|...|` quoting when the name is not a plain SMT-LIB
/// symbol.
pub fn smt_symbol(name: &str) -> String {
    const RESERVED: &[&str] = &[
        "true", "false", "and", "or", "not", "xor", "ite", "let", "distinct", "par", "forall",
        "exists", "as", "_", "!",
    ];
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c))
        && !RESERVED.contains(&name);
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

/// Constant in SMT-LIB syntax for the given sort.
pub fn smt_number(v: &BigRational, sort: NumSort) -> String {
    let mag = v.abs();
    let body = match sort {
        NumSort::Int => mag.numer().to_string(),
        NumSort::Real if mag.denom().is_one() => format!("{}.0", mag.numer()),
        NumSort::Real => format!("(/ {}.0 {}.0)", mag.numer(), mag.denom()),
    };
    if v.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

/// Emits a script with declarations and a single assertion. Without
/// `force`, purely propositional formulas are rejected.
pub fn emit(g: &GroundFormula, enc: CardEncoding, force: bool) -> Result<SmtScript, SmtError> {
    let logic = match classify(g)? {
        Some(l) => l,
        None if force => Logic::QfUf,
        None => return Err(SmtError::NoTheory),
    };
    let vars = theory_vars(g);
    let sort = vars.first().map(|v| v.sort).unwrap_or(NumSort::Int);

    let mut bool_atoms = Vec::new();
    let mut seen = HashSet::new();
    g.for_each_atom(&mut |a| {
        let t = a.text();
        if seen.insert(t.clone()) {
            bool_atoms.push(t);
        }
    });

    let mut em = Emitter {
        sort,
        enc,
        aux: Vec::new(),
        defs: Vec::new(),
        constraints: 0,
    };
    let main = em.formula(g)?;

    let mut body = String::new();
    body.push_str("(set-option :produce-models true)\n");
    body.push_str(&format!("(set-logic {logic})\n"));
    for a in &bool_atoms {
        body.push_str(&format!("(declare-const {} Bool)\n", smt_symbol(a)));
    }
    for v in &vars {
        let s = match v.sort {
            NumSort::Int => "Int",
            NumSort::Real => "Real",
        };
        body.push_str(&format!("(declare-const {} {s})\n", smt_symbol(&v.name)));
    }
    for a in &em.aux {
        body.push_str(&format!("(declare-const {a} Bool)\n"));
    }
    if em.defs.is_empty() {
        body.push_str(&format!("(assert {main})\n"));
    } else {
        body.push_str(&format!("(assert (and {main}"));
        for d in &em.defs {
            body.push_str("\n  ");
            body.push_str(d);
        }
        body.push_str("))\n");
    }
    Ok(SmtScript {
        logic,
        body,
        bool_atoms,
        theory_vars: vars,
    })
}

struct Emitter {
    sort: NumSort,
    enc: CardEncoding,
    /// Generated Boolean symbols.
    aux: Vec<String>,
    /// Definitional constraints conjoined with the main formula.
    defs: Vec<String>,
    constraints: usize,
}

fn nary(op: &str, xs: Vec<String>, empty: &str) -> String {
    match xs.len() {
        0 => empty.to_string(),
        1 => xs.into_iter().next().unwrap(),
        _ => format!("({op} {})", xs.join(" ")),
    }
}

impl Emitter {
    fn formula(&mut self, g: &GroundFormula) -> Result<String, SmtError> {
        use GroundFormula::*;
        Ok(match g {
            True => "true".into(),
            False => "false".into(),
            Lit(a, true) => smt_symbol(&a.text()),
            Lit(a, false) => format!("(not {})", smt_symbol(&a.text())),
            Not(x) => format!("(not {})", self.formula(x)?),
            And(xs) => {
                let parts = xs.iter().map(|x| self.formula(x)).collect::<Result<_, _>>()?;
                nary("and", parts, "true")
            }
            Or(xs) => {
                let parts = xs.iter().map(|x| self.formula(x)).collect::<Result<_, _>>()?;
                nary("or", parts, "false")
            }
            Impl(a, b) => format!("(=> {} {})", self.formula(a)?, self.formula(b)?),
            Iff(a, b) => format!("(= {} {})", self.formula(a)?, self.formula(b)?),
            Theory { cmp, lhs, rhs } => self.theory(*cmp, lhs, rhs)?,
            Card { kind, k, lits } => {
                let terms = lits.iter().map(|x| self.formula(x)).collect::<Result<Vec<_>, _>>()?;
                self.card(*kind, *k, terms)
            }
        })
    }

    fn theory(&self, cmp: CmpOp, lhs: &GTerm, rhs: &GTerm) -> Result<String, SmtError> {
        let a = atom_affine(lhs, rhs, self.sort)?;
        Ok(a.to_smt_atom(cmp, self.sort))
    }

    fn fresh(&mut self, prefix: &str) -> String {
        let name = format!("_{prefix}{}", self.aux.len() + 1);
        self.aux.push(name.clone());
        name
    }

    /// Defines a fresh Boolean equivalent to the cardinality constraint
    /// through its clausal encoding and its complement's.
    fn card(&mut self, kind: CardKind, k: i64, terms: Vec<String>) -> String {
        let d = self.fresh("C");
        let n = terms.len() as i64;
        let not_d = format!("(not {d})");
        self.guarded_card(&not_d, kind, k, &terms);
        match kind {
            CardKind::AtMost => self.guarded_card(&d, CardKind::AtLeast, k + 1, &terms),
            CardKind::AtLeast => self.guarded_card(&d, CardKind::AtMost, k - 1, &terms),
            CardKind::Exact => {
                let below = if k > 0 { Some(self.fresh("C")) } else { None };
                let above = if k < n { Some(self.fresh("C")) } else { None };
                let mut cl = vec![d.clone()];
                cl.extend(below.iter().cloned());
                cl.extend(above.iter().cloned());
                self.defs.push(nary("or", cl, "false"));
                if let Some(b) = below {
                    self.guarded_card(&format!("(not {b})"), CardKind::AtMost, k - 1, &terms);
                }
                if let Some(a) = above {
                    self.guarded_card(&format!("(not {a})"), CardKind::AtLeast, k + 1, &terms);
                }
            }
        }
        d
    }

    /// Adds `guard or C` for every clause `C` of the encoding.
    fn guarded_card(&mut self, guard: &str, kind: CardKind, k: i64, terms: &[String]) {
        let n = terms.len() as i64;
        let ids: Vec<i32> = (1..=n as i32).collect();
        let mut names: Vec<String> = Vec::new();
        let constraints = &mut self.constraints;
        let mut alloc = NamedAlloc {
            next: n as i32,
            names: &mut names,
            constraints,
        };
        let enc = self.enc;
        let clauses: Option<Vec<Clause>> = match kind {
            CardKind::AtMost if k < 0 => None,
            CardKind::AtMost => Some(encode_atmost(&ids, k.min(n) as usize, enc, &mut alloc)),
            CardKind::AtLeast if k > n => None,
            CardKind::AtLeast => Some(encode_atleast(&ids, k.max(0) as usize, enc, &mut alloc)),
            CardKind::Exact if k < 0 || k > n => None,
            CardKind::Exact => Some(encode_exact(&ids, k as usize, enc, &mut alloc)),
        };
        self.aux.extend(names.iter().cloned());
        let Some(clauses) = clauses else {
            // The constraint is unsatisfiable, so the guard must hold.
            self.defs.push(guard.to_string());
            return;
        };
        let lit = |l: i32| {
            let v = l.unsigned_abs() as usize;
            let t = if v <= terms.len() {
                terms[v - 1].clone()
            } else {
                names[v - terms.len() - 1].clone()
            };
            if l < 0 {
                format!("(not {t})")
            } else {
                t
            }
        };
        for c in clauses {
            let mut parts = vec![guard.to_string()];
            parts.extend(c.into_iter().map(lit));
            self.defs.push(nary("or", parts, "false"));
        }
    }
}

struct NamedAlloc<'a> {
    next: i32,
    names: &'a mut Vec<String>,
    constraints: &'a mut usize,
}

impl VarAlloc for NamedAlloc<'_> {
    fn alloc(&mut self, name: String) -> i32 {
        self.next += 1;
        self.names.push(name);
        self.next
    }

    fn next_constraint_id(&mut self) -> usize {
        *self.constraints += 1;
        *self.constraints
    }
}

/// Structural check of a script: balanced, known commands, every symbol
/// declared once and before use.
pub fn check_script(text: &str) -> Result<(), String> {
    const BUILTINS: &[&str] = &[
        "true", "false", "and", "or", "not", "=>", "=", "distinct", "xor", "ite", "<", "<=", ">",
        ">=", "+", "-", "*", "/", "div", "mod", "abs",
    ];
    let forms = sexpr::parse_all(text)?;
    let mut declared: HashSet<String> = HashSet::new();
    let mut logic_set = false;
    for f in &forms {
        let xs = f.list().ok_or_else(|| format!("top-level atom '{f}'"))?;
        let head = xs.first().and_then(|h| h.atom()).ok_or("empty command")?;
        match head {
            "set-option" | "set-info" | "check-sat" | "get-model" | "exit" => {}
            "set-logic" => {
                if logic_set || !declared.is_empty() {
                    return Err("set-logic must come first and only once".into());
                }
                logic_set = true;
            }
            "declare-const" => {
                let [_, name, sort] = xs else {
                    return Err(format!("malformed {f}"));
                };
                let name = name.atom().ok_or("declared name must be a symbol")?;
                if !matches!(sort.atom(), Some("Bool" | "Int" | "Real")) {
                    return Err(format!("unknown sort in {f}"));
                }
                if !declared.insert(sexpr::unquote(name).to_string()) {
                    return Err(format!("'{name}' declared twice"));
                }
            }
            "assert" => {
                let [_, body] = xs else {
                    return Err(format!("malformed {f}"));
                };
                check_term(body, &declared, BUILTINS)?;
            }
            other => return Err(format!("unknown command '{other}'")),
        }
    }
    Ok(())
}

fn check_term(t: &sexpr::SExpr, declared: &HashSet<String>, builtins: &[&str]) -> Result<(), String> {
    match t {
        sexpr::SExpr::Atom(a) => {
            let numeric = a.chars().next().is_some_and(|c| c.is_ascii_digit());
            if numeric || builtins.contains(&a.as_str()) || declared.contains(sexpr::unquote(a)) {
                Ok(())
            } else {
                Err(format!("undeclared symbol '{a}'"))
            }
        }
        sexpr::SExpr::Str(_) => Err("string literal in a term".into()),
        sexpr::SExpr::List(xs) => {
            let Some(head) = xs.first().and_then(|h| h.atom()) else {
                return Err(format!("application without operator: {t}"));
            };
            if !builtins.contains(&head) {
                return Err(format!("unknown operator '{head}'"));
            }
            if xs.len() < 2 {
                return Err(format!("operator '{head}' without arguments"));
            }
            xs[1..].iter().try_for_each(|x| check_term(x, declared, builtins))
        }
    }
}

/// Evaluates `g` under a solver model. Missing symbols default to false
/// and zero.
pub fn check_model(g: &GroundFormula, m: &SmtModel) -> Result<bool, SmtError> {
    let mut err = None;
    let ok = g.eval(
        &mut |a| m.bools.get(&a.text()).copied().unwrap_or(false),
        &mut |cmp, l, r| {
            let value = |t: &GTerm| eval_term(t, &|name| m.nums.get(name).cloned().unwrap_or_else(BigRational::zero));
            match (value(l), value(r)) {
                (Ok(a), Ok(b)) => match cmp {
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                },
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    false
                }
            }
        },
    );
    match err {
        Some(e) => Err(e),
        None => Ok(ok),
    }
}

/// Model values keyed by symbol name, for display.
pub fn model_map(m: &SmtModel) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (k, v) in &m.bools {
        out.insert(k.clone(), v.to_string());
    }
    for (k, v) in &m.nums {
        out.insert(k.clone(), v.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground;
    use crate::parse;

    fn g(src: &str) -> GroundFormula {
        ground(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn difference_atoms_are_rdl() {
        let f = g("real tau\ntau(a) < tau(b)");
        let s = emit(&f, CardEncoding::Auto, false).unwrap();
        assert_eq!(s.logic, Logic::QfRdl);
        let t = s.text();
        assert!(t.contains("(declare-const tau_a Real)"), "{t}");
        assert!(t.contains("(declare-const tau_b Real)"), "{t}");
        assert!(t.contains("(assert (< tau_a tau_b))"), "{t}");
        check_script(&t).unwrap();
    }

    #[test]
    fn sums_are_lia() {
        let f = g("int x\nx(1,1) + x(1,2) == 5");
        let s = emit(&f, CardEncoding::Auto, false).unwrap();
        assert_eq!(s.logic, Logic::QfLia);
        assert!(s.text().contains("(assert (= (+ x_1_1 x_1_2) 5))"), "{}", s.text());
    }

    #[test]
    fn bounds_are_idl() {
        let f = g("int x\nx(1) >= 2 and x(1) - x(2) <= 0 - 3");
        assert_eq!(classify(&f).unwrap(), Some(Logic::QfIdl));
        let t = emit(&f, CardEncoding::Auto, false).unwrap().text();
        assert!(t.contains("(>= x_1 2)"), "{t}");
        assert!(t.contains("(<= (- x_1 x_2) (- 3))"), "{t}");
    }

    #[test]
    fn mixed_and_nonlinear_rejected() {
        assert!(matches!(
            classify(&g("int x\nreal y\nx(1) < y(1)")),
            Err(SmtError::MixedSorts(..))
        ));
        assert!(matches!(
            classify(&g("int x\nx(1) * x(2) < 3")),
            Err(SmtError::Nonlinear(_))
        ));
    }

    #[test]
    fn pure_sat_needs_force() {
        let f = g("p and q");
        assert_eq!(emit(&f, CardEncoding::Auto, false).unwrap_err(), SmtError::NoTheory);
        let s = emit(&f, CardEncoding::Auto, true).unwrap();
        assert_eq!(s.logic, Logic::QfUf);
        check_script(&s.text()).unwrap();
    }

    #[test]
    fn quoting() {
        assert_eq!(smt_symbol("P(1,2)"), "|P(1,2)|");
        assert_eq!(smt_symbol("tau_a"), "tau_a");
        assert_eq!(smt_symbol("true"), "|true|");
        let f = g("P(1,2) or not P(2,1)");
        let t = emit(&f, CardEncoding::Auto, true).unwrap().text();
        assert!(t.contains("(declare-const |P(1,2)| Bool)"), "{t}");
    }

    #[test]
    fn numbers() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(smt_number(&r(-5, 1), NumSort::Int), "(- 5)");
        assert_eq!(smt_number(&r(5, 1), NumSort::Real), "5.0");
        assert_eq!(smt_number(&r(-1, 3), NumSort::Real), "(- (/ 1.0 3.0))");
    }

    #[test]
    fn cards_are_defined_and_well_formed() {
        let f = g("int x\natmost 1, $i in (1..3): P($i) end and exact 2, $i in (1..4): P($i) end and x(1) > 0");
        let t = emit(&f, CardEncoding::SeqCounter, false).unwrap().text();
        check_script(&t).unwrap();
        assert!(t.contains("(declare-const _C1 Bool)"), "{t}");
    }

    #[test]
    fn script_checker_catches_problems() {
        assert!(check_script("(set-logic QF_LIA)(assert (< x 1))").is_err());
        assert!(check_script("(declare-const x Int)(declare-const x Int)").is_err());
        assert!(check_script("(declare-const x Int)(assert (foo x))").is_err());
        assert!(check_script("(declare-const x Int)(assert (< x 1)").is_err());
        check_script("(set-logic QF_LIA)(declare-const x Int)(assert (< x 1))(check-sat)").unwrap();
    }
}
