//! Input-syntax and LaTeX rendering.
//!
//! `render_input` emits the minimum parentheses needed for the parser's
//! precedence and associativity rules, so parse ∘ render is the identity on
//! trees (spans aside).

use std::fmt::Write;

use crate::ast::*;
use crate::value::{format_rat, Scalar};

// Formula precedence levels, loosest first.
const P_IFF: u8 = 1;
const P_IMPL: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_NOT: u8 = 5;
const P_ATOM: u8 = 6;

fn bin_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Iff => P_IFF,
        BinOp::Impl => P_IMPL,
        BinOp::Or => P_OR,
        BinOp::And => P_AND,
    }
}

/// Minimum precedence of the (left, right) operands of a binary connective.
fn operand_prec(op: BinOp) -> (u8, u8) {
    let p = bin_prec(op);
    match op {
        // right-associative
        BinOp::Impl => (p + 1, p),
        _ => (p, p + 1),
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Bin(op, ..) => bin_prec(*op),
        ExprKind::Not(_) => P_NOT,
        _ => P_ATOM,
    }
}

// ---------------------------------------------------------------------------
// Input syntax

pub fn render_input(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

pub fn render_program(p: &Program) -> String {
    let mut out = String::new();
    if !p.sets.is_empty() {
        out.push_str("sets:\n");
        for s in &p.sets {
            let _ = writeln!(out, "{} = {}", s.name, render_set(&s.value));
        }
    }
    for n in &p.numerics {
        let sort = match n.sort {
            NumSort::Int => "int",
            NumSort::Real => "real",
        };
        let _ = writeln!(out, "{sort} {}", n.name);
    }
    out.push_str("formulas:\n");
    for f in &p.formulas {
        out.push_str(&render_input(f));
        out.push('\n');
    }
    out
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let paren = expr_prec(e) < min_prec;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::True => out.push_str("Top"),
        ExprKind::False => out.push_str("Bot"),
        ExprKind::Atom { name, indices } => write_applied(out, name, indices),
        ExprKind::VarAtom { var, indices } => write_applied(out, var, indices),
        ExprKind::Not(x) => {
            out.push_str("not ");
            write_expr(out, x, P_NOT);
        }
        ExprKind::Bin(op, l, r) => {
            let (lp, rp) = operand_prec(*op);
            write_expr(out, l, lp);
            out.push_str(match op {
                BinOp::And => " and ",
                BinOp::Or => " or ",
                BinOp::Impl => " => ",
                BinOp::Iff => " <=> ",
            });
            write_expr(out, r, rp);
        }
        ExprKind::Big {
            op,
            binders,
            when,
            body,
        } => {
            out.push_str(match op {
                BigOp::And => "bigand ",
                BigOp::Or => "bigor ",
            });
            write_binders(out, binders, when.as_ref());
            out.push_str(": ");
            write_expr(out, body, 0);
            out.push_str(" end");
        }
        ExprKind::Card {
            kind,
            k,
            binders,
            when,
            body,
        } => {
            out.push_str(kind.keyword());
            out.push(' ');
            out.push_str(&render_arith(k));
            out.push_str(", ");
            write_binders(out, binders, when.as_ref());
            out.push_str(": ");
            write_expr(out, body, 0);
            out.push_str(" end");
        }
        ExprKind::Theory { cmp, lhs, rhs } => {
            let _ = write!(
                out,
                "{} {} {}",
                render_arith(lhs),
                cmp.input_text(),
                render_arith(rhs)
            );
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_applied(out: &mut String, name: &str, indices: &[Arith]) {
    out.push_str(name);
    if !indices.is_empty() {
        out.push('(');
        for (i, a) in indices.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&render_arith(a));
        }
        out.push(')');
    }
}

fn write_binders(out: &mut String, binders: &[Binder], when: Option<&Cond>) {
    for (i, b) in binders.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{} in {}", b.var, render_set(&b.set));
    }
    if let Some(c) = when {
        out.push_str(" when ");
        out.push_str(&render_cond(c));
    }
}

fn arith_prec(a: &Arith) -> u8 {
    match &a.kind {
        ArithKind::Bin(ArithOp::Add | ArithOp::Sub, ..) => 1,
        ArithKind::Bin(..) => 2,
        _ => 3,
    }
}

pub fn render_arith(a: &Arith) -> String {
    let mut out = String::new();
    write_arith(&mut out, a, 0);
    out
}

fn write_arith(out: &mut String, a: &Arith, min_prec: u8) {
    let paren = arith_prec(a) < min_prec;
    if paren {
        out.push('(');
    }
    match &a.kind {
        ArithKind::Const(s) => out.push_str(&scalar_input(s)),
        ArithKind::Var(v) => out.push_str(v),
        ArithKind::NumTerm { name, indices } => write_applied(out, name, indices),
        ArithKind::Bin(op, l, r) => {
            let p = arith_prec(a);
            write_arith(out, l, p);
            let _ = write!(out, " {} ", op.input_text());
            write_arith(out, r, p + 1);
        }
        ArithKind::Sqrt(x) => {
            out.push_str("sqrt(");
            write_arith(out, x, 0);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn scalar_input(s: &Scalar) -> String {
    match s {
        Scalar::Int(i) => i.to_string(),
        Scalar::Rat(r) => format_rat(*r),
        Scalar::Sym(s) => s.clone(),
    }
}

pub fn render_set(s: &SetExpr) -> String {
    let mut out = String::new();
    write_set(&mut out, s, false);
    out
}

fn write_set(out: &mut String, s: &SetExpr, nested: bool) {
    match &s.kind {
        SetKind::Name(n) => out.push_str(n),
        SetKind::Range(lo, hi) => {
            let _ = write!(out, "({}..{})", render_arith(lo), render_arith(hi));
        }
        SetKind::Literal(items) => {
            out.push('(');
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&render_arith(a));
            }
            if items.len() == 1 {
                out.push(',');
            }
            out.push(')');
        }
        SetKind::Bin(op, l, r) => {
            if nested {
                out.push('(');
            }
            write_set(out, l, false);
            let _ = write!(out, " {} ", op.keyword());
            write_set(out, r, true);
            if nested {
                out.push(')');
            }
        }
    }
}

fn cond_prec(c: &Cond) -> u8 {
    match &c.kind {
        CondKind::Or(..) => 1,
        CondKind::And(..) => 2,
        CondKind::Not(_) => 3,
        _ => 4,
    }
}

pub fn render_cond(c: &Cond) -> String {
    let mut out = String::new();
    write_cond(&mut out, c, 0);
    out
}

fn write_cond(out: &mut String, c: &Cond, min_prec: u8) {
    let p = cond_prec(c);
    let paren = p < min_prec;
    if paren {
        out.push('(');
    }
    match &c.kind {
        CondKind::Cmp(op, l, r) => {
            let _ = write!(
                out,
                "{} {} {}",
                render_arith(l),
                op.input_text(),
                render_arith(r)
            );
        }
        CondKind::In(a, s) => {
            let _ = write!(out, "{} in {}", render_arith(a), render_set(s));
        }
        CondKind::And(l, r) | CondKind::Or(l, r) => {
            write_cond(out, l, p);
            out.push_str(if p == 2 { " and " } else { " or " });
            write_cond(out, r, p + 1);
        }
        CondKind::Not(x) => {
            out.push_str("not ");
            write_cond(out, x, p);
        }
    }
    if paren {
        out.push(')');
    }
}

// ---------------------------------------------------------------------------
// LaTeX

pub fn render_latex(e: &Expr) -> String {
    let mut out = String::new();
    latex_expr(&mut out, e, 0);
    out
}

/// One line per set definition, then one per formula.
pub fn render_program_latex(p: &Program) -> String {
    let mut out = String::new();
    for s in &p.sets {
        let _ = writeln!(
            out,
            "{} = {}",
            latex_name(strip_dollar(&s.name)),
            latex_set_str(&s.value)
        );
    }
    for f in &p.formulas {
        out.push_str(&render_latex(f));
        out.push('\n');
    }
    out
}

fn strip_dollar(v: &str) -> &str {
    v.strip_prefix('$').unwrap_or(v)
}

fn latex_name(name: &str) -> String {
    let escaped = name.replace('_', "\\_");
    if name.chars().count() == 1 {
        escaped
    } else {
        format!("\\mathit{{{escaped}}}")
    }
}

fn latex_expr(out: &mut String, e: &Expr, min_prec: u8) {
    // Big operators extend as far right as possible; parenthesize them when
    // they are an operand of a binary connective.
    let prec = match &e.kind {
        ExprKind::Big { .. } | ExprKind::Card { .. } => P_NOT,
        _ => expr_prec(e),
    };
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::True => out.push_str("\\top"),
        ExprKind::False => out.push_str("\\bot"),
        ExprKind::Atom { name, indices } => latex_applied(out, name, indices),
        ExprKind::VarAtom { var, indices } => latex_applied(out, strip_dollar(var), indices),
        ExprKind::Not(x) => {
            out.push_str("\\lnot ");
            latex_expr(out, x, P_NOT);
        }
        ExprKind::Bin(op, l, r) => {
            let (lp, rp) = operand_prec(*op);
            latex_expr(out, l, operand_min(l, lp));
            out.push_str(match op {
                BinOp::And => " \\wedge ",
                BinOp::Or => " \\vee ",
                BinOp::Impl => " \\Rightarrow ",
                BinOp::Iff => " \\Leftrightarrow ",
            });
            latex_expr(out, r, operand_min(r, rp));
        }
        ExprKind::Big {
            op,
            binders,
            when,
            body,
        } => {
            out.push_str(match op {
                BigOp::And => "\\bigwedge",
                BigOp::Or => "\\bigvee",
            });
            out.push_str("_{");
            latex_binders(out, binders, when.as_ref());
            out.push_str("} ");
            latex_expr(out, body, P_NOT);
        }
        ExprKind::Card {
            kind,
            k,
            binders,
            when,
            body,
        } => {
            let rel = match kind {
                CardKind::AtLeast => "\\geq",
                CardKind::AtMost => "\\leq",
                CardKind::Exact => "=",
            };
            let _ = write!(out, "\\bigwedge^{{{rel} {}}}_{{", latex_arith_str(k));
            latex_binders(out, binders, when.as_ref());
            out.push_str("} ");
            latex_expr(out, body, P_NOT);
        }
        ExprKind::Theory { cmp, lhs, rhs } => {
            let _ = write!(
                out,
                "{} {} {}",
                latex_arith_str(lhs),
                latex_cmp(*cmp),
                latex_arith_str(rhs)
            );
        }
    }
    if paren {
        out.push(')');
    }
}

fn operand_min(e: &Expr, prec: u8) -> u8 {
    match e.kind {
        ExprKind::Big { .. } | ExprKind::Card { .. } => P_ATOM,
        _ => prec,
    }
}

fn latex_applied(out: &mut String, name: &str, indices: &[Arith]) {
    out.push_str(&latex_name(name));
    if !indices.is_empty() {
        out.push_str("_{");
        for (i, a) in indices.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            latex_arith(out, a, 0);
        }
        out.push('}');
    }
}

fn latex_binders(out: &mut String, binders: &[Binder], when: Option<&Cond>) {
    for (i, b) in binders.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(
            out,
            "{} \\in {}",
            latex_name(strip_dollar(&b.var)),
            latex_set_str(&b.set)
        );
    }
    if let Some(c) = when {
        out.push_str(" \\mid ");
        latex_cond(out, c, 0);
    }
}

fn latex_cmp(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Lt => "<",
        CmpOp::Gt => ">",
        CmpOp::Le => "\\leq",
        CmpOp::Ge => "\\geq",
        CmpOp::Eq => "=",
        CmpOp::Ne => "\\neq",
    }
}

fn latex_arith_str(a: &Arith) -> String {
    let mut out = String::new();
    latex_arith(&mut out, a, 0);
    out
}

fn latex_arith(out: &mut String, a: &Arith, min_prec: u8) {
    let paren = arith_prec(a) < min_prec;
    if paren {
        out.push('(');
    }
    match &a.kind {
        ArithKind::Const(Scalar::Sym(s)) => out.push_str(&latex_name(s)),
        ArithKind::Const(s) => out.push_str(&scalar_input(s)),
        ArithKind::Var(v) => out.push_str(&latex_name(strip_dollar(v))),
        ArithKind::NumTerm { name, indices } => latex_applied(out, name, indices),
        ArithKind::Bin(op, l, r) => {
            let p = arith_prec(a);
            latex_arith(out, l, p);
            out.push_str(match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => " \\cdot ",
                ArithOp::Div => "/",
                ArithOp::Mod => " \\bmod ",
            });
            latex_arith(out, r, p + 1);
        }
        ArithKind::Sqrt(x) => {
            out.push_str("\\sqrt{");
            latex_arith(out, x, 0);
            out.push('}');
        }
    }
    if paren {
        out.push(')');
    }
}

fn latex_set_str(s: &SetExpr) -> String {
    let mut out = String::new();
    latex_set(&mut out, s, false);
    out
}

fn latex_set(out: &mut String, s: &SetExpr, nested: bool) {
    match &s.kind {
        SetKind::Name(n) => out.push_str(&latex_name(strip_dollar(n))),
        SetKind::Range(lo, hi) => {
            let _ = write!(
                out,
                "\\{{{}..{}\\}}",
                latex_arith_str(lo),
                latex_arith_str(hi)
            );
        }
        SetKind::Literal(items) => {
            out.push_str("\\{");
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                latex_arith(out, a, 0);
            }
            out.push_str("\\}");
        }
        SetKind::Bin(op, l, r) => {
            if nested {
                out.push('(');
            }
            latex_set(out, l, false);
            out.push_str(match op {
                SetOp::Union => " \\cup ",
                SetOp::Inter => " \\cap ",
                SetOp::Diff => " \\setminus ",
            });
            latex_set(out, r, true);
            if nested {
                out.push(')');
            }
        }
    }
}

fn latex_cond(out: &mut String, c: &Cond, min_prec: u8) {
    let p = cond_prec(c);
    let paren = p < min_prec;
    if paren {
        out.push('(');
    }
    match &c.kind {
        CondKind::Cmp(op, l, r) => {
            let _ = write!(
                out,
                "{} {} {}",
                latex_arith_str(l),
                latex_cmp(*op),
                latex_arith_str(r)
            );
        }
        CondKind::In(a, s) => {
            let _ = write!(out, "{} \\in {}", latex_arith_str(a), latex_set_str(s));
        }
        CondKind::And(l, r) | CondKind::Or(l, r) => {
            latex_cond(out, l, p);
            out.push_str(if p == 2 { " \\wedge " } else { " \\vee " });
            latex_cond(out, r, p + 1);
        }
        CondKind::Not(x) => {
            out.push_str("\\lnot ");
            latex_cond(out, x, p);
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: i64) -> Expr {
        Expr::atom("P", vec![Arith::int(i)])
    }

    #[test]
    fn conjunction() {
        let e = Expr::bin(BinOp::And, Expr::atom("P", vec![]), Expr::atom("Q", vec![]));
        assert_eq!(render_input(&e), "P and Q");
    }

    #[test]
    fn implication_with_indices() {
        let e = Expr::bin(BinOp::Impl, p(1), Expr::atom("Q", vec![Arith::int(2)]));
        assert_eq!(render_input(&e), "P(1) => Q(2)");
    }

    #[test]
    fn parenthesizes_only_when_needed() {
        let e = Expr::bin(
            BinOp::And,
            Expr::bin(BinOp::Or, p(1), p(2)),
            Expr::bin(BinOp::And, p(3), p(4)),
        );
        assert_eq!(render_input(&e), "(P(1) or P(2)) and (P(3) and P(4))");
        let chain = Expr::bin(BinOp::Impl, p(1), Expr::bin(BinOp::Impl, p(2), p(3)));
        assert_eq!(render_input(&chain), "P(1) => P(2) => P(3)");
        let left = Expr::bin(BinOp::Impl, Expr::bin(BinOp::Impl, p(1), p(2)), p(3));
        assert_eq!(render_input(&left), "(P(1) => P(2)) => P(3)");
    }

    #[test]
    fn one_element_literal_has_trailing_comma() {
        let s = SetExpr::new(SetKind::Literal(vec![Arith::sym("A")]));
        assert_eq!(render_set(&s), "(A,)");
    }

    #[test]
    fn arithmetic_keeps_left_associativity() {
        let a = Arith::bin(
            ArithOp::Sub,
            Arith::var("$i"),
            Arith::bin(ArithOp::Sub, Arith::var("$j"), Arith::int(1)),
        );
        assert_eq!(render_arith(&a), "$i - ($j - 1)");
    }

    fn big_p() -> Expr {
        Expr::new(ExprKind::Big {
            op: BigOp::And,
            binders: vec![Binder::new("$i", SetExpr::name("$N"))],
            when: None,
            body: Box::new(Expr::atom("P", vec![Arith::var("$i")])),
        })
    }

    #[test]
    fn latex_big_and() {
        assert_eq!(render_latex(&big_p()), "\\bigwedge_{i \\in N} P_{i}");
    }

    #[test]
    fn latex_not() {
        assert_eq!(render_latex(&Expr::not(Expr::atom("A", vec![]))), "\\lnot A");
    }

    #[test]
    fn latex_cardinality() {
        let e = Expr::new(ExprKind::Card {
            kind: CardKind::AtMost,
            k: Arith::int(2),
            binders: vec![Binder::new("$i", SetExpr::name("$N"))],
            when: None,
            body: Box::new(Expr::atom("P", vec![Arith::var("$i")])),
        });
        assert_eq!(render_latex(&e), "\\bigwedge^{\\leq 2}_{i \\in N} P_{i}");
    }

    #[test]
    fn latex_body_implication_is_parenthesized() {
        let e = Expr::new(ExprKind::Big {
            op: BigOp::And,
            binders: vec![Binder::new(
                "$i",
                SetExpr::range(Arith::int(1), Arith::int(9)),
            )],
            when: None,
            body: Box::new(Expr::bin(
                BinOp::Impl,
                Expr::atom("P", vec![Arith::var("$i")]),
                Expr::atom(
                    "Q",
                    vec![Arith::bin(ArithOp::Add, Arith::var("$i"), Arith::int(1))],
                ),
            )),
        });
        assert_eq!(
            render_latex(&e),
            "\\bigwedge_{i \\in \\{1..9\\}} (P_{i} \\Rightarrow Q_{i+1})"
        );
    }

    #[test]
    fn latex_never_mentions_dollar() {
        let e = Expr::new(ExprKind::VarAtom {
            var: "$X".into(),
            indices: vec![Arith::var("$i")],
        });
        assert_eq!(render_latex(&e), "X_{i}");
    }
}
