//! Grounding: evaluates set and index expressions and unrolls every binder,
//! producing a variable-free [`GroundFormula`].

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::diag::Diagnostic;
use crate::value::{Scalar, SetValue};

/// Largest range a set expression may denote.
const MAX_RANGE: i64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundAtom {
    pub name: String,
    pub indices: Vec<Scalar>,
}

impl GroundAtom {
    pub fn new(name: impl Into<String>, indices: Vec<Scalar>) -> Self {
        GroundAtom {
            name: name.into(),
            indices,
        }
    }

    /// Canonical text: `name(i1,i2)` or bare `name`.
    pub fn text(&self) -> String {
        if self.indices.is_empty() {
            return self.name.clone();
        }
        let idx: Vec<String> = self.indices.iter().map(Scalar::index_text).collect();
        format!("{}({})", self.name, idx.join(","))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// A ground numeric theory symbol such as `tau_a_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryVar {
    pub name: String,
    pub sort: NumSort,
}

/// Ground numeric term of a theory atom.
#[derive(Debug, Clone, PartialEq)]
pub enum GTerm {
    Num(Scalar),
    Var(TheoryVar),
    Bin(ArithOp, Box<GTerm>, Box<GTerm>),
    Sqrt(Box<GTerm>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroundFormula {
    True,
    False,
    Lit(GroundAtom, bool),
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
    Impl(Box<GroundFormula>, Box<GroundFormula>),
    Iff(Box<GroundFormula>, Box<GroundFormula>),
    Card {
        kind: CardKind,
        k: i64,
        lits: Vec<GroundFormula>,
    },
    Theory {
        cmp: CmpOp,
        lhs: GTerm,
        rhs: GTerm,
    },
}

impl GroundFormula {
    pub fn atom(name: &str, indices: Vec<Scalar>) -> Self {
        GroundFormula::Lit(GroundAtom::new(name, indices), true)
    }

    pub fn negate(self) -> GroundFormula {
        match self {
            GroundFormula::Lit(a, pol) => GroundFormula::Lit(a, !pol),
            GroundFormula::True => GroundFormula::False,
            GroundFormula::False => GroundFormula::True,
            other => GroundFormula::Not(Box::new(other)),
        }
    }

    pub fn has_theory(&self) -> bool {
        use GroundFormula::*;
        match self {
            True | False | Lit(..) => false,
            Theory { .. } => true,
            Not(x) => x.has_theory(),
            And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().any(Self::has_theory),
            Impl(a, b) | Iff(a, b) => a.has_theory() || b.has_theory(),
        }
    }

    /// Calls `f` on every atom occurrence, left to right.
    pub fn for_each_atom(&self, f: &mut impl FnMut(&GroundAtom)) {
        use GroundFormula::*;
        match self {
            True | False | Theory { .. } => {}
            Lit(a, _) => f(a),
            Not(x) => x.for_each_atom(f),
            And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().for_each(|x| x.for_each_atom(f)),
            Impl(a, b) | Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    /// Evaluates under an atom assignment; `theory` decides theory atoms.
    pub fn eval(
        &self,
        atom: &mut impl FnMut(&GroundAtom) -> bool,
        theory: &mut impl FnMut(CmpOp, &GTerm, &GTerm) -> bool,
    ) -> bool {
        use GroundFormula::*;
        match self {
            True => true,
            False => false,
            Lit(a, pol) => atom(a) == *pol,
            Not(x) => !x.eval(atom, theory),
            And(xs) => xs.iter().all(|x| x.eval(atom, theory)),
            Or(xs) => xs.iter().any(|x| x.eval(atom, theory)),
            Impl(a, b) => !a.eval(atom, theory) || b.eval(atom, theory),
            Iff(a, b) => a.eval(atom, theory) == b.eval(atom, theory),
            Card { kind, k, lits } => {
                let n = lits.iter().filter(|x| x.eval(atom, theory)).count() as i64;
                match kind {
                    CardKind::AtLeast => n >= *k,
                    CardKind::AtMost => n <= *k,
                    CardKind::Exact => n == *k,
                }
            }
            Theory { cmp, lhs, rhs } => theory(*cmp, lhs, rhs),
        }
    }

    /// Propositional evaluation; theory atoms make this panic, so callers
    /// must check [`has_theory`](Self::has_theory) first.
    pub fn eval_prop(&self, atom: &mut impl FnMut(&GroundAtom) -> bool) -> bool {
        self.eval(atom, &mut |_, _, _| panic!("theory atom in propositional evaluation"))
    }

    /// Number of nodes, for statistics.
    pub fn size(&self) -> usize {
        use GroundFormula::*;
        1 + match self {
            True | False | Lit(..) | Theory { .. } => 0,
            Not(x) => x.size(),
            And(xs) | Or(xs) | Card { lits: xs, .. } => xs.iter().map(Self::size).sum(),
            Impl(a, b) | Iff(a, b) => a.size() + b.size(),
        }
    }
}

impl fmt::Display for GTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GTerm::Num(s) => write!(f, "{s}"),
            GTerm::Var(v) => f.write_str(&v.name),
            GTerm::Bin(op, a, b) => write!(f, "({a} {} {b})", op.input_text()),
            GTerm::Sqrt(x) => write!(f, "sqrt({x})"),
        }
    }
}

impl fmt::Display for GroundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroundFormula::*;
        let join = |f: &mut fmt::Formatter<'_>, xs: &[GroundFormula], sep: &str| {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            True => f.write_str("Top"),
            False => f.write_str("Bot"),
            Lit(a, true) => write!(f, "{a}"),
            Lit(a, false) => write!(f, "not {a}"),
            Not(x) => write!(f, "not ({x})"),
            And(xs) => join(f, xs, " and "),
            Or(xs) => join(f, xs, " or "),
            Impl(a, b) => write!(f, "({a} => {b})"),
            Iff(a, b) => write!(f, "({a} <=> {b})"),
            Card { kind, k, lits } => {
                write!(f, "{} {k} ", kind.keyword())?;
                join(f, lits, ", ")
            }
            Theory { cmp, lhs, rhs } => write!(f, "{lhs} {} {rhs}", cmp.input_text()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}{}", context_suffix(.context))]
pub struct GroundError {
    pub message: String,
    pub span: Span,
    /// Binder values in effect, e.g. `$i=3, $j=7`.
    pub context: String,
}

fn context_suffix(ctx: &str) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(" (with {ctx})")
    }
}

impl GroundError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.to_string(), self.span)
    }
}

/// Folds degenerate cardinality constraints; everything else stays a
/// `Card` node for the clause encoder.
pub fn normalize_card(kind: CardKind, k: i64, lits: Vec<GroundFormula>) -> GroundFormula {
    let n = lits.len() as i64;
    let all = |lits: Vec<GroundFormula>| conj(lits);
    let none = |lits: Vec<GroundFormula>| conj(lits.into_iter().map(GroundFormula::negate).collect());
    match kind {
        CardKind::AtLeast if k <= 0 => GroundFormula::True,
        CardKind::AtLeast if k > n => GroundFormula::False,
        CardKind::AtLeast if k == n => all(lits),
        CardKind::AtMost if k < 0 => GroundFormula::False,
        CardKind::AtMost if k >= n => GroundFormula::True,
        CardKind::AtMost if k == 0 => none(lits),
        CardKind::Exact if k < 0 || k > n => GroundFormula::False,
        CardKind::Exact if k == 0 => none(lits),
        CardKind::Exact if k == n => all(lits),
        _ => GroundFormula::Card { kind, k, lits },
    }
}

fn conj(mut xs: Vec<GroundFormula>) -> GroundFormula {
    match xs.len() {
        0 => GroundFormula::True,
        1 => xs.pop().unwrap(),
        _ => GroundFormula::And(xs),
    }
}

/// Grounds a whole program. One formula comes back as is; several are
/// conjoined in source order.
pub fn ground(p: &Program) -> Result<GroundFormula, GroundError> {
    let mut g = Grounder::new(p);
    for decl in &p.sets {
        let v = g.eval_set(&decl.value)?;
        g.sets.insert(decl.name.clone(), v);
    }
    let mut parts = Vec::with_capacity(p.formulas.len());
    for f in &p.formulas {
        parts.push(g.formula(f)?);
    }
    let out = if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        GroundFormula::And(parts)
    };
    g.check_theory_names(&out)?;
    Ok(out)
}

/// Evaluation environment: declared sets and the binder stack.
pub struct Grounder<'p> {
    sets: HashMap<String, SetValue>,
    binds: Vec<(String, Scalar)>,
    numerics: HashMap<&'p str, NumSort>,
    theory_vars: HashMap<String, Span>,
}

impl<'p> Grounder<'p> {
    pub fn new(p: &'p Program) -> Self {
        Grounder {
            sets: HashMap::new(),
            binds: Vec::new(),
            numerics: p.numerics.iter().map(|d| (d.name.as_str(), d.sort)).collect(),
            theory_vars: HashMap::new(),
        }
    }

    pub fn define_set(&mut self, name: &str, value: SetValue) {
        self.sets.insert(name.to_string(), value);
    }

    pub fn bind(&mut self, var: &str, value: Scalar) {
        self.binds.push((var.to_string(), value));
    }

    fn err(&self, message: impl Into<String>, span: Span) -> GroundError {
        let context = self
            .binds
            .iter()
            .map(|(v, s)| format!("{v}={s}"))
            .collect::<Vec<_>>()
            .join(", ");
        GroundError {
            message: message.into(),
            span,
            context,
        }
    }

    fn lookup(&self, var: &str, span: Span) -> Result<&Scalar, GroundError> {
        match self.binds.iter().rev().find(|(v, _)| v == var) {
            Some((_, s)) => Ok(s),
            None if self.sets.contains_key(var) => {
                Err(self.err(format!("set {var} used where a value is expected"), span))
            }
            None => Err(self.err(format!("unbound variable {var}"), span)),
        }
    }

    // -- sets ---------------------------------------------------------------

    pub fn eval_set(&self, s: &SetExpr) -> Result<SetValue, GroundError> {
        match &s.kind {
            SetKind::Name(n) => self
                .sets
                .get(n)
                .cloned()
                .ok_or_else(|| self.err(format!("undeclared set {n}"), s.span)),
            SetKind::Range(lo, hi) => {
                let bound = |a: &Arith| -> Result<i64, GroundError> {
                    match self.eval_arith(a)? {
                        Scalar::Int(i) => Ok(i),
                        other => Err(self.err(
                            format!("range bound must be an integer, got {} {other}", other.kind_name()),
                            a.span,
                        )),
                    }
                };
                let (lo, hi) = (bound(lo)?, bound(hi)?);
                if hi >= lo && (hi as i128 - lo as i128) >= MAX_RANGE as i128 {
                    return Err(self.err(
                        format!("range ({lo}..{hi}) has more than {MAX_RANGE} elements"),
                        s.span,
                    ));
                }
                Ok(SetValue::range(lo, hi))
            }
            SetKind::Literal(items) => {
                let mut v = SetValue::new();
                for a in items {
                    v.insert(self.eval_arith(a)?);
                }
                Ok(v)
            }
            SetKind::Bin(op, l, r) => {
                let (l, r) = (self.eval_set(l)?, self.eval_set(r)?);
                Ok(match op {
                    SetOp::Union => l.union(&r),
                    SetOp::Inter => l.intersection(&r),
                    SetOp::Diff => l.difference(&r),
                })
            }
        }
    }

    // -- arithmetic ---------------------------------------------------------

    pub fn eval_arith(&self, a: &Arith) -> Result<Scalar, GroundError> {
        match &a.kind {
            ArithKind::Const(s) => Ok(s.clone()),
            ArithKind::Var(v) => self.lookup(v, a.span).cloned(),
            ArithKind::NumTerm { name, .. } => Err(self.err(
                format!("numeric symbol '{name}' cannot be used in index arithmetic"),
                a.span,
            )),
            ArithKind::Bin(op, l, r) => {
                let (x, y) = (self.eval_arith(l)?, self.eval_arith(r)?);
                self.apply(*op, x, y, a.span)
            }
            ArithKind::Sqrt(x) => {
                let v = self.eval_arith(x)?;
                match v {
                    Scalar::Int(n) if n < 0 => {
                        Err(self.err(format!("square root of negative number {n}"), a.span))
                    }
                    Scalar::Int(n) => {
                        let r = n.isqrt();
                        if r * r == n {
                            Ok(Scalar::Int(r))
                        } else {
                            Ok(Scalar::Rat((n as f64).sqrt()))
                        }
                    }
                    Scalar::Rat(r) if r < 0.0 => {
                        Err(self.err(format!("square root of negative number {r}"), a.span))
                    }
                    Scalar::Rat(r) => Ok(Scalar::Rat(r.sqrt())),
                    Scalar::Sym(s) => Err(self.err(format!("square root of symbol {s}"), a.span)),
                }
            }
        }
    }

    fn apply(&self, op: ArithOp, x: Scalar, y: Scalar, span: Span) -> Result<Scalar, GroundError> {
        let overflow = || self.err("integer overflow in index arithmetic", span);
        match (&x, &y) {
            (Scalar::Sym(_), _) | (_, Scalar::Sym(_)) => Err(self.err(
                format!("arithmetic '{}' on symbol ({x} {} {y})", op.input_text(), op.input_text()),
                span,
            )),
            (Scalar::Int(a), Scalar::Int(b)) => {
                let (a, b) = (*a, *b);
                match op {
                    ArithOp::Add => a.checked_add(b).map(Scalar::Int).ok_or_else(overflow),
                    ArithOp::Sub => a.checked_sub(b).map(Scalar::Int).ok_or_else(overflow),
                    ArithOp::Mul => a.checked_mul(b).map(Scalar::Int).ok_or_else(overflow),
                    ArithOp::Div => {
                        if b == 0 {
                            return Err(self.err("division by zero", span));
                        }
                        match a.checked_rem(b) {
                            Some(0) => a.checked_div(b).map(Scalar::Int).ok_or_else(overflow),
                            _ => Ok(Scalar::Rat(a as f64 / b as f64)),
                        }
                    }
                    ArithOp::Mod => {
                        if b == 0 {
                            return Err(self.err("modulo by zero", span));
                        }
                        a.checked_rem_euclid(b).map(Scalar::Int).ok_or_else(overflow)
                    }
                }
            }
            _ => {
                let (a, b) = (x.as_f64().unwrap(), y.as_f64().unwrap());
                let r = match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div if b == 0.0 => return Err(self.err("division by zero", span)),
                    ArithOp::Div => a / b,
                    ArithOp::Mod => {
                        return Err(self.err(
                            format!("mod needs integer operands, got {x} and {y}"),
                            span,
                        ))
                    }
                };
                if r.is_finite() {
                    Ok(Scalar::Rat(r))
                } else {
                    Err(overflow())
                }
            }
        }
    }

    // -- conditions ---------------------------------------------------------

    pub fn eval_cond(&self, c: &Cond) -> Result<bool, GroundError> {
        match &c.kind {
            CondKind::Cmp(op, l, r) => {
                let (x, y) = (self.eval_arith(l)?, self.eval_arith(r)?);
                self.compare(*op, &x, &y, c.span)
            }
            CondKind::In(a, s) => {
                let x = self.eval_arith(a)?;
                Ok(self.eval_set(s)?.contains(&x))
            }
            CondKind::And(l, r) => Ok(self.eval_cond(l)? && self.eval_cond(r)?),
            CondKind::Or(l, r) => Ok(self.eval_cond(l)? || self.eval_cond(r)?),
            CondKind::Not(x) => Ok(!self.eval_cond(x)?),
        }
    }

    fn compare(&self, op: CmpOp, x: &Scalar, y: &Scalar, span: Span) -> Result<bool, GroundError> {
        let r = match op {
            CmpOp::Eq => x.try_eq(y),
            CmpOp::Ne => x.try_eq(y).map(|b| !b),
            _ => x.try_cmp(y).map(|o| op.holds(o)),
        };
        r.map_err(|e| self.err(format!("{e} ({x} {} {y})", op.input_text()), span))
    }

    // -- formulas -----------------------------------------------------------

    pub fn formula(&mut self, e: &Expr) -> Result<GroundFormula, GroundError> {
        Ok(match &e.kind {
            ExprKind::True => GroundFormula::True,
            ExprKind::False => GroundFormula::False,
            ExprKind::Atom { name, indices } => {
                GroundFormula::Lit(GroundAtom::new(name, self.indices(indices)?), true)
            }
            ExprKind::VarAtom { var, indices } => {
                let head = Span::new(e.span.start, e.span.start + var.len());
                let name = match self.lookup(var, head)? {
                    Scalar::Sym(s) => s.clone(),
                    other => {
                        return Err(self.err(
                            format!("{var} is bound to {} {other}, not a predicate name", other.kind_name()),
                            head,
                        ))
                    }
                };
                GroundFormula::Lit(GroundAtom::new(name, self.indices(indices)?), true)
            }
            ExprKind::Not(x) => self.formula(x)?.negate(),
            ExprKind::Bin(op, l, r) => {
                let (l, r) = (self.formula(l)?, self.formula(r)?);
                match op {
                    BinOp::And => GroundFormula::And(vec![l, r]),
                    BinOp::Or => GroundFormula::Or(vec![l, r]),
                    BinOp::Impl => GroundFormula::Impl(Box::new(l), Box::new(r)),
                    BinOp::Iff => GroundFormula::Iff(Box::new(l), Box::new(r)),
                }
            }
            ExprKind::Big {
                op,
                binders,
                when,
                body,
            } => {
                let parts = self.unroll(binders, when.as_ref(), body)?;
                match (op, parts.len()) {
                    (BigOp::And, 0) => GroundFormula::True,
                    (BigOp::Or, 0) => GroundFormula::False,
                    (BigOp::And, _) => GroundFormula::And(parts),
                    (BigOp::Or, _) => GroundFormula::Or(parts),
                }
            }
            ExprKind::Card {
                kind,
                k,
                binders,
                when,
                body,
            } => {
                let k = match self.eval_arith(k)? {
                    Scalar::Int(i) => i,
                    other => {
                        return Err(self.err(
                            format!("cardinality bound must be an integer, got {other}"),
                            k.span,
                        ))
                    }
                };
                let lits = self.unroll(binders, when.as_ref(), body)?;
                normalize_card(*kind, k, lits)
            }
            ExprKind::Theory { cmp, lhs, rhs } => {
                if !lhs.contains_num_term() && !rhs.contains_num_term() {
                    let (x, y) = (self.eval_arith(lhs)?, self.eval_arith(rhs)?);
                    if self.compare(*cmp, &x, &y, e.span)? {
                        GroundFormula::True
                    } else {
                        GroundFormula::False
                    }
                } else {
                    GroundFormula::Theory {
                        cmp: *cmp,
                        lhs: self.term(lhs)?,
                        rhs: self.term(rhs)?,
                    }
                }
            }
        })
    }

    fn indices(&self, indices: &[Arith]) -> Result<Vec<Scalar>, GroundError> {
        indices.iter().map(|a| self.eval_arith(a)).collect()
    }

    /// Grounds `body` once per binder tuple that passes `when`, in
    /// lexicographic order of the domains.
    fn unroll(
        &mut self,
        binders: &[Binder],
        when: Option<&Cond>,
        body: &Expr,
    ) -> Result<Vec<GroundFormula>, GroundError> {
        let mut out = Vec::new();
        self.unroll_from(binders, when, body, &mut out)?;
        Ok(out)
    }

    fn unroll_from(
        &mut self,
        binders: &[Binder],
        when: Option<&Cond>,
        body: &Expr,
        out: &mut Vec<GroundFormula>,
    ) -> Result<(), GroundError> {
        let Some((first, rest)) = binders.split_first() else {
            if let Some(c) = when {
                if !self.eval_cond(c)? {
                    return Ok(());
                }
            }
            out.push(self.formula(body)?);
            return Ok(());
        };
        let domain = self.eval_set(&first.set)?;
        for value in domain.elements() {
            self.binds.push((first.var.clone(), value.clone()));
            let r = self.unroll_from(rest, when, body, out);
            self.binds.pop();
            r?;
        }
        Ok(())
    }

    fn term(&mut self, a: &Arith) -> Result<GTerm, GroundError> {
        if !a.contains_num_term() {
            let v = self.eval_arith(a)?;
            if !v.is_numeric() {
                return Err(self.err(format!("symbol {v} used as a number"), a.span));
            }
            return Ok(GTerm::Num(v));
        }
        Ok(match &a.kind {
            ArithKind::NumTerm { name, indices } => {
                let sort = *self
                    .numerics
                    .get(name.as_str())
                    .ok_or_else(|| self.err(format!("undeclared numeric symbol '{name}'"), a.span))?;
                let mut text = name.clone();
                for s in self.indices(indices)? {
                    text.push('_');
                    text.push_str(&s.index_text());
                }
                self.theory_vars.entry(text.clone()).or_insert(a.span);
                GTerm::Var(TheoryVar { name: text, sort })
            }
            ArithKind::Bin(op, l, r) => GTerm::Bin(*op, Box::new(self.term(l)?), Box::new(self.term(r)?)),
            ArithKind::Sqrt(x) => GTerm::Sqrt(Box::new(self.term(x)?)),
            ArithKind::Const(_) | ArithKind::Var(_) => unreachable!("handled above"),
        })
    }

    fn check_theory_names(&self, g: &GroundFormula) -> Result<(), GroundError> {
        if self.theory_vars.is_empty() {
            return Ok(());
        }
        let mut clash = None;
        g.for_each_atom(&mut |a| {
            if clash.is_none() {
                let t = a.text();
                if self.theory_vars.contains_key(&t) {
                    clash = Some(t);
                }
            }
        });
        match clash {
            Some(name) => Err(GroundError {
                message: format!("numeric term {name} has the same name as a proposition"),
                span: self.theory_vars[&name],
                context: String::new(),
            }),
            None => Ok(()),
        }
    }
}
