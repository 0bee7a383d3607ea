//! Static name resolution: every `$` name must be a declared set or a
//! binder in scope, and each must be used in the right role.

use std::collections::HashSet;

use crate::ast::*;
use crate::diag::Diagnostic;

struct Scope<'a> {
    sets: HashSet<&'a str>,
    binders: Vec<&'a str>,
    errors: Vec<Diagnostic>,
}

pub(super) fn check(p: &Program) -> Vec<Diagnostic> {
    let mut sc = Scope {
        sets: HashSet::new(),
        binders: Vec::new(),
        errors: Vec::new(),
    };
    for decl in &p.sets {
        // Declarations may only refer to sets declared above them.
        sc.set(&decl.value);
        sc.sets.insert(&decl.name);
    }
    for f in &p.formulas {
        sc.expr(f);
    }
    sc.errors
}

impl<'a> Scope<'a> {
    fn is_bound(&self, v: &str) -> bool {
        self.binders.contains(&v)
    }

    fn scalar_var(&mut self, v: &str, span: Span) {
        if self.is_bound(v) {
            return;
        }
        if self.sets.contains(v) {
            self.errors.push(Diagnostic::error(
                format!("set {v} used where a value is expected"),
                span,
            ));
        } else {
            self.errors
                .push(Diagnostic::error(format!("unbound variable {v}"), span));
        }
    }

    fn expr(&mut self, e: &'a Expr) {
        match &e.kind {
            ExprKind::True | ExprKind::False => {}
            ExprKind::Atom { indices, .. } => indices.iter().for_each(|a| self.arith(a)),
            ExprKind::VarAtom { var, indices } => {
                let head = Span::new(e.span.start, e.span.start + var.len());
                self.scalar_var(var, head);
                indices.iter().for_each(|a| self.arith(a));
            }
            ExprKind::Not(x) => self.expr(x),
            ExprKind::Bin(_, l, r) => {
                self.expr(l);
                self.expr(r);
            }
            ExprKind::Big {
                binders,
                when,
                body,
                ..
            } => self.block(binders, when.as_ref(), body),
            ExprKind::Card {
                k,
                binders,
                when,
                body,
                ..
            } => {
                self.arith(k);
                self.block(binders, when.as_ref(), body);
            }
            ExprKind::Theory { lhs, rhs, .. } => {
                self.arith(lhs);
                self.arith(rhs);
            }
        }
    }

    fn block(&mut self, binders: &'a [Binder], when: Option<&'a Cond>, body: &'a Expr) {
        let depth = self.binders.len();
        for b in binders {
            self.set(&b.set);
            if self.sets.contains(b.var.as_str()) {
                self.errors.push(Diagnostic::error(
                    format!("binder {} shadows the set of the same name", b.var),
                    b.span,
                ));
            }
            self.binders.push(&b.var);
        }
        if let Some(c) = when {
            self.cond(c);
        }
        self.expr(body);
        self.binders.truncate(depth);
    }

    fn arith(&mut self, a: &'a Arith) {
        match &a.kind {
            ArithKind::Const(_) => {}
            ArithKind::Var(v) => self.scalar_var(v, a.span),
            ArithKind::NumTerm { indices, .. } => indices.iter().for_each(|i| self.arith(i)),
            ArithKind::Bin(_, l, r) => {
                self.arith(l);
                self.arith(r);
            }
            ArithKind::Sqrt(x) => self.arith(x),
        }
    }

    fn set(&mut self, s: &'a SetExpr) {
        match &s.kind {
            SetKind::Name(n) => {
                if self.is_bound(n) {
                    self.errors.push(Diagnostic::error(
                        format!("variable {n} holds a value, not a set"),
                        s.span,
                    ));
                } else if !self.sets.contains(n.as_str()) {
                    self.errors
                        .push(Diagnostic::error(format!("undeclared set {n}"), s.span));
                }
            }
            SetKind::Range(lo, hi) => {
                self.arith(lo);
                self.arith(hi);
            }
            SetKind::Literal(items) => items.iter().for_each(|a| self.arith(a)),
            SetKind::Bin(_, l, r) => {
                self.set(l);
                self.set(r);
            }
        }
    }

    fn cond(&mut self, c: &'a Cond) {
        match &c.kind {
            CondKind::Cmp(_, l, r) => {
                self.arith(l);
                self.arith(r);
            }
            CondKind::In(a, s) => {
                self.arith(a);
                self.set(s);
            }
            CondKind::And(l, r) | CondKind::Or(l, r) => {
                self.cond(l);
                self.cond(r);
            }
            CondKind::Not(x) => self.cond(x),
        }
    }
}
