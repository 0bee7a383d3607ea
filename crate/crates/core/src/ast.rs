//! Syntax tree shared by the parser, renderers and grounder.
//!
//! Variable names keep their `$` prefix (`$i`, `$N`). Every node carries a
//! byte-offset [`Span`] into the (newline-normalized) source.

use std::collections::BTreeSet;

use crate::value::Scalar;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn input_text(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Lt => ord == Less,
            CmpOp::Gt => ord == Greater,
            CmpOp::Le => ord != Greater,
            CmpOp::Ge => ord != Less,
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl ArithOp {
    pub fn input_text(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "mod",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CardKind {
    AtLeast,
    AtMost,
    Exact,
}

impl CardKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CardKind::AtLeast => "atleast",
            CardKind::AtMost => "atmost",
            CardKind::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BigOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Impl,
    Iff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Inter,
    Diff,
}

impl SetOp {
    pub fn keyword(self) -> &'static str {
        match self {
            SetOp::Union => "union",
            SetOp::Inter => "inter",
            SetOp::Diff => "diff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumSort {
    Int,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arith {
    pub kind: ArithKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArithKind {
    Const(Scalar),
    Var(String),
    /// Occurrence of a declared numeric theory symbol.
    NumTerm { name: String, indices: Vec<Arith> },
    Bin(ArithOp, Box<Arith>, Box<Arith>),
    Sqrt(Box<Arith>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetExpr {
    pub kind: SetKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Name(String),
    Range(Box<Arith>, Box<Arith>),
    Literal(Vec<Arith>),
    Bin(SetOp, Box<SetExpr>, Box<SetExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub kind: CondKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CondKind {
    Cmp(CmpOp, Arith, Arith),
    In(Arith, SetExpr),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binder {
    pub var: String,
    pub set: SetExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    True,
    False,
    Atom { name: String, indices: Vec<Arith> },
    /// `$X(...)`: the predicate name is itself a bound variable.
    VarAtom { var: String, indices: Vec<Arith> },
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Big {
        op: BigOp,
        binders: Vec<Binder>,
        when: Option<Cond>,
        body: Box<Expr>,
    },
    Card {
        kind: CardKind,
        k: Arith,
        binders: Vec<Binder>,
        when: Option<Cond>,
        body: Box<Expr>,
    },
    Theory { cmp: CmpOp, lhs: Arith, rhs: Arith },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDecl {
    pub name: String,
    pub value: SetExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumDecl {
    pub sort: NumSort,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub sets: Vec<SetDecl>,
    pub numerics: Vec<NumDecl>,
    pub formulas: Vec<Expr>,
}

impl Program {
    pub fn numeric_sort(&self, name: &str) -> Option<NumSort> {
        self.numerics.iter().find(|d| d.name == name).map(|d| d.sort)
    }

    /// Copy of the program with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        for s in &mut p.sets {
            s.span = Span::default();
            s.value.clear_spans();
        }
        for n in &mut p.numerics {
            n.span = Span::default();
        }
        for f in &mut p.formulas {
            f.clear_spans();
        }
        p
    }
}

// ---------------------------------------------------------------------------
// Constructors (mostly for tests and generators)

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn atom(name: &str, indices: Vec<Arith>) -> Self {
        Expr::new(ExprKind::Atom {
            name: name.to_string(),
            indices,
        })
    }

    pub fn not(e: Expr) -> Self {
        Expr::new(ExprKind::Not(Box::new(e)))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Bin(op, Box::new(l), Box::new(r)))
    }
}

impl Arith {
    pub fn new(kind: ArithKind) -> Self {
        Arith {
            kind,
            span: Span::default(),
        }
    }

    pub fn int(i: i64) -> Self {
        Arith::new(ArithKind::Const(Scalar::Int(i)))
    }

    pub fn sym(s: &str) -> Self {
        Arith::new(ArithKind::Const(Scalar::sym(s)))
    }

    pub fn var(v: &str) -> Self {
        Arith::new(ArithKind::Var(v.to_string()))
    }

    pub fn bin(op: ArithOp, l: Arith, r: Arith) -> Self {
        Arith::new(ArithKind::Bin(op, Box::new(l), Box::new(r)))
    }
}

impl SetExpr {
    pub fn new(kind: SetKind) -> Self {
        SetExpr {
            kind,
            span: Span::default(),
        }
    }

    pub fn name(n: &str) -> Self {
        SetExpr::new(SetKind::Name(n.to_string()))
    }

    pub fn range(lo: Arith, hi: Arith) -> Self {
        SetExpr::new(SetKind::Range(Box::new(lo), Box::new(hi)))
    }
}

impl Binder {
    pub fn new(var: &str, set: SetExpr) -> Self {
        Binder {
            var: var.to_string(),
            set,
            span: Span::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables

/// The `$`-variables of `e` not bound by an enclosing binder. Declared set
/// names referenced by the formula show up here too.
pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    expr_fv(e, &mut bound, &mut out);
    out
}

fn note(v: &str, bound: &[String], out: &mut BTreeSet<String>) {
    if !bound.iter().any(|b| b == v) {
        out.insert(v.to_string());
    }
}

fn binders_fv(
    binders: &[Binder],
    when: Option<&Cond>,
    body: &Expr,
    bound: &mut Vec<String>,
    out: &mut BTreeSet<String>,
) {
    let depth = bound.len();
    // A binder's domain may mention the binders before it.
    for b in binders {
        set_fv(&b.set, bound, out);
        bound.push(b.var.clone());
    }
    if let Some(c) = when {
        cond_fv(c, bound, out);
    }
    expr_fv(body, bound, out);
    bound.truncate(depth);
}

fn expr_fv(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::True | ExprKind::False => {}
        ExprKind::Atom { indices, .. } => indices.iter().for_each(|a| arith_fv(a, bound, out)),
        ExprKind::VarAtom { var, indices } => {
            note(var, bound, out);
            indices.iter().for_each(|a| arith_fv(a, bound, out));
        }
        ExprKind::Not(x) => expr_fv(x, bound, out),
        ExprKind::Bin(_, l, r) => {
            expr_fv(l, bound, out);
            expr_fv(r, bound, out);
        }
        ExprKind::Big {
            binders,
            when,
            body,
            ..
        } => binders_fv(binders, when.as_ref(), body, bound, out),
        ExprKind::Card {
            k,
            binders,
            when,
            body,
            ..
        } => {
            arith_fv(k, bound, out);
            binders_fv(binders, when.as_ref(), body, bound, out);
        }
        ExprKind::Theory { lhs, rhs, .. } => {
            arith_fv(lhs, bound, out);
            arith_fv(rhs, bound, out);
        }
    }
}

fn arith_fv(a: &Arith, bound: &[String], out: &mut BTreeSet<String>) {
    match &a.kind {
        ArithKind::Const(_) => {}
        ArithKind::Var(v) => note(v, bound, out),
        ArithKind::NumTerm { indices, .. } => indices.iter().for_each(|i| arith_fv(i, bound, out)),
        ArithKind::Bin(_, l, r) => {
            arith_fv(l, bound, out);
            arith_fv(r, bound, out);
        }
        ArithKind::Sqrt(x) => arith_fv(x, bound, out),
    }
}

fn set_fv(s: &SetExpr, bound: &[String], out: &mut BTreeSet<String>) {
    match &s.kind {
        SetKind::Name(n) => note(n, bound, out),
        SetKind::Range(lo, hi) => {
            arith_fv(lo, bound, out);
            arith_fv(hi, bound, out);
        }
        SetKind::Literal(items) => items.iter().for_each(|a| arith_fv(a, bound, out)),
        SetKind::Bin(_, l, r) => {
            set_fv(l, bound, out);
            set_fv(r, bound, out);
        }
    }
}

fn cond_fv(c: &Cond, bound: &[String], out: &mut BTreeSet<String>) {
    match &c.kind {
        CondKind::Cmp(_, l, r) => {
            arith_fv(l, bound, out);
            arith_fv(r, bound, out);
        }
        CondKind::In(a, s) => {
            arith_fv(a, bound, out);
            set_fv(s, bound, out);
        }
        CondKind::And(l, r) | CondKind::Or(l, r) => {
            cond_fv(l, bound, out);
            cond_fv(r, bound, out);
        }
        CondKind::Not(x) => cond_fv(x, bound, out),
    }
}

// ---------------------------------------------------------------------------
// Span erasure

impl Expr {
    pub fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::True | ExprKind::False => {}
            ExprKind::Atom { indices, .. } | ExprKind::VarAtom { indices, .. } => {
                indices.iter_mut().for_each(Arith::clear_spans)
            }
            ExprKind::Not(x) => x.clear_spans(),
            ExprKind::Bin(_, l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
            ExprKind::Big {
                binders,
                when,
                body,
                ..
            } => {
                clear_binders(binders, when);
                body.clear_spans();
            }
            ExprKind::Card {
                k,
                binders,
                when,
                body,
                ..
            } => {
                k.clear_spans();
                clear_binders(binders, when);
                body.clear_spans();
            }
            ExprKind::Theory { lhs, rhs, .. } => {
                lhs.clear_spans();
                rhs.clear_spans();
            }
        }
    }

    pub fn without_spans(&self) -> Expr {
        let mut e = self.clone();
        e.clear_spans();
        e
    }
}

fn clear_binders(binders: &mut [Binder], when: &mut Option<Cond>) {
    for b in binders {
        b.span = Span::default();
        b.set.clear_spans();
    }
    if let Some(c) = when {
        c.clear_spans();
    }
}

impl Arith {
    pub fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ArithKind::Const(_) | ArithKind::Var(_) => {}
            ArithKind::NumTerm { indices, .. } => indices.iter_mut().for_each(Arith::clear_spans),
            ArithKind::Bin(_, l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
            ArithKind::Sqrt(x) => x.clear_spans(),
        }
    }

    pub fn contains_num_term(&self) -> bool {
        match &self.kind {
            ArithKind::NumTerm { .. } => true,
            ArithKind::Const(_) | ArithKind::Var(_) => false,
            ArithKind::Bin(_, l, r) => l.contains_num_term() || r.contains_num_term(),
            ArithKind::Sqrt(x) => x.contains_num_term(),
        }
    }
}

impl SetExpr {
    pub fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            SetKind::Name(_) => {}
            SetKind::Range(lo, hi) => {
                lo.clear_spans();
                hi.clear_spans();
            }
            SetKind::Literal(items) => items.iter_mut().for_each(Arith::clear_spans),
            SetKind::Bin(_, l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
        }
    }
}

impl Cond {
    pub fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            CondKind::Cmp(_, l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
            CondKind::In(a, s) => {
                a.clear_spans();
                s.clear_spans();
            }
            CondKind::And(l, r) | CondKind::Or(l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
            CondKind::Not(x) => x.clear_spans(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unbound_index_is_free() {
        let e = Expr::atom("P", vec![Arith::var("$i")]);
        assert_eq!(free_vars(&e), set(&["$i"]));
    }

    #[test]
    fn binder_binds_its_variable_but_not_the_set_name() {
        let e = Expr::new(ExprKind::Big {
            op: BigOp::And,
            binders: vec![Binder::new("$i", SetExpr::name("$N"))],
            when: None,
            body: Box::new(Expr::atom("P", vec![Arith::var("$i")])),
        });
        assert_eq!(free_vars(&e), set(&["$N"]));
    }

    #[test]
    fn later_binder_domain_sees_earlier_binder() {
        let e = Expr::new(ExprKind::Big {
            op: BigOp::Or,
            binders: vec![
                Binder::new("$i", SetExpr::name("$N")),
                Binder::new("$j", SetExpr::range(Arith::var("$i"), Arith::int(3))),
            ],
            when: None,
            body: Box::new(Expr::atom("P", vec![Arith::var("$j")])),
        });
        assert_eq!(free_vars(&e), set(&["$N"]));
    }
}
