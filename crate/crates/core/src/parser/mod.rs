//! Recursive-descent parser for `.tw` sources.
//!
//! ```text
//! program  := preamble formula+
//! preamble := ( "sets" ":" | "$S" "=" set | ("int"|"real") ident ("," ident)* )*
//!             ( "formulas" ":" )?
//! formula  := iff
//! iff      := impl ( "<=>" impl )*
//! impl     := or ( "=>" impl )?
//! or       := and ( "or" and )*
//! and      := unary ( "and" unary )*
//! unary    := "not" unary | primary
//! primary  := arith cmp arith | "(" formula ")" | "Top" | "Bot"
//!           | ("bigand"|"bigor") binders ":" formula "end"
//!           | ("atleast"|"atmost"|"exact") arith "," binders ":" formula "end"
//!           | ident ( "(" arith ("," arith)* ")" )? | "$X" ( "(" ... ")" )?
//! binders  := "$v" "in" set ("," "$v" "in" set)* ( "when" cond )?
//! ```
//!
//! Consecutive top-level formulas are implicitly conjoined. An index list
//! must open on the same line as its predicate name.

mod lexer;
mod scope;

use std::collections::HashMap;

pub use lexer::{tokenize, Keyword, Token, TokenKind};

use crate::ast::*;
use crate::diag::Diagnostic;
use crate::value::Scalar;

const MAX_DEPTH: usize = 200;
const PARSER_STACK: usize = 64 << 20;

/// `\r\n` → `\n`; spans always refer to the normalized text.
pub fn normalize_newlines(src: &str) -> std::borrow::Cow<'_, str> {
    if src.contains("\r\n") {
        src.replace("\r\n", "\n").into()
    } else {
        src.into()
    }
}

/// Parses a program, dropping warnings.
pub fn parse(src: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_with_warnings(src).map(|(p, _)| p)
}

/// Parses a program. `src` must already be newline-normalized for spans
/// to line up with what the caller holds.
pub fn parse_with_warnings(src: &str) -> Result<(Program, Vec<Diagnostic>), Vec<Diagnostic>> {
    // Recursive descent on a dedicated stack, so the nesting limit is what
    // rejects pathological input rather than the caller's stack size.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(PARSER_STACK)
            .spawn_scoped(s, || parse_on_this_thread(src))
            .expect("spawn parser thread")
            .join()
            .expect("parser thread panicked")
    })
}

fn parse_on_this_thread(src: &str) -> Result<(Program, Vec<Diagnostic>), Vec<Diagnostic>> {
    let toks = tokenize(src).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        pos: 0,
        src_len: src.len(),
        numerics: HashMap::new(),
        warnings: Vec::new(),
        depth: 0,
    };
    let program = p.program().map_err(|d| vec![d])?;
    let errors = scope::check(&program);
    if errors.is_empty() {
        Ok((program, p.warnings))
    } else {
        Err(errors)
    }
}

/// Decodes raw bytes first; invalid UTF-8 is reported as a diagnostic.
pub fn parse_bytes(src: &[u8]) -> Result<Program, Vec<Diagnostic>> {
    match std::str::from_utf8(src) {
        Ok(s) => parse(&normalize_newlines(s)),
        Err(e) => {
            let at = e.valid_up_to();
            Err(vec![Diagnostic::error(
                "input is not valid UTF-8",
                Span::new(at, at),
            )])
        }
    }
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    src_len: usize,
    numerics: HashMap<String, NumSort>,
    warnings: Vec<Diagnostic>,
    depth: usize,
}

impl Parser {
    // -- token helpers ------------------------------------------------------

    fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + n).map(|t| &t.kind)
    }

    fn peek_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Kw(kw))
    }

    fn at_line_start(&self) -> bool {
        self.toks.get(self.pos).is_some_and(|t| t.line_start)
    }

    fn here(&self) -> Span {
        match self.toks.get(self.pos) {
            Some(t) => t.span,
            None => Span::new(self.src_len, self.src_len),
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Kw(kw))
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> PResult<Span> {
        if self.peek() == Some(kind) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        match self.toks.get(self.pos) {
            Some(t) => Diagnostic::error(format!("expected {what}, found '{}'", t.kind), t.span),
            None => Diagnostic::error(format!("expected {what}, found end of input"), self.here()),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(Diagnostic::error("expression is nested too deeply", self.here()))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    /// Runs `f`; on failure rewinds to where it started.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let (pos, depth) = (self.pos, self.depth);
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = pos;
                self.depth = depth;
                None
            }
        }
    }

    // -- program ------------------------------------------------------------

    fn program(&mut self) -> PResult<Program> {
        let mut program = Program::default();
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(TokenKind::Kw(Keyword::Sets)), Some(TokenKind::Colon)) => {
                    self.pos += 2;
                }
                (Some(TokenKind::Var(_)), Some(TokenKind::Assign)) => {
                    let decl = self.set_decl()?;
                    if program.sets.iter().any(|s| s.name == decl.name) {
                        return Err(Diagnostic::error(
                            format!("set {} is declared twice", decl.name),
                            decl.span,
                        ));
                    }
                    program.sets.push(decl);
                }
                (Some(TokenKind::Kw(kw @ (Keyword::Int | Keyword::Real))), _) => {
                    let sort = if *kw == Keyword::Int {
                        NumSort::Int
                    } else {
                        NumSort::Real
                    };
                    self.pos += 1;
                    loop {
                        let t = self.bump_ident("a numeric symbol name")?;
                        let TokenKind::Ident(name) = t.kind else {
                            unreachable!()
                        };
                        if self.numerics.contains_key(&name) {
                            return Err(Diagnostic::error(
                                format!("numeric symbol '{name}' is declared twice"),
                                t.span,
                            ));
                        }
                        self.numerics.insert(name.clone(), sort);
                        program.numerics.push(NumDecl {
                            sort,
                            name,
                            span: t.span,
                        });
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                (Some(TokenKind::Kw(Keyword::Formulas)), Some(TokenKind::Colon)) => {
                    self.pos += 2;
                    break;
                }
                _ => break,
            }
        }
        while self.peek().is_some() {
            program.formulas.push(self.formula()?);
        }
        if program.formulas.is_empty() {
            return Err(Diagnostic::error("the program contains no formula", self.here()));
        }
        Ok(program)
    }

    fn bump_ident(&mut self, what: &str) -> PResult<Token> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => Ok(self.bump()),
            _ => Err(self.unexpected(what)),
        }
    }

    fn set_decl(&mut self) -> PResult<SetDecl> {
        let t = self.bump();
        let TokenKind::Var(name) = t.kind else {
            unreachable!()
        };
        self.bump(); // `=`
        let value = self.set_expr()?;
        Ok(SetDecl {
            name,
            span: t.span.to(value.span),
            value,
        })
    }

    // -- formulas -----------------------------------------------------------

    fn formula(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.iff();
        self.leave();
        r
    }

    fn iff(&mut self) -> PResult<Expr> {
        let mut lhs = self.implication()?;
        while self.eat(&TokenKind::Iff) {
            let rhs = self.implication()?;
            lhs = binary(BinOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Expr> {
        let lhs = self.disjunction()?;
        if self.eat(&TokenKind::Implies) {
            self.enter()?;
            let rhs = self.implication();
            self.leave();
            Ok(binary(BinOp::Impl, lhs, rhs?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Expr> {
        let mut lhs = self.conjunction()?;
        while self.eat_kw(Keyword::Or) {
            let rhs = self.conjunction()?;
            lhs = binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat_kw(Keyword::And) {
            let rhs = self.unary()?;
            lhs = binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = if self.peek_kw(Keyword::Not) {
            let start = self.bump().span;
            self.unary().map(|x| Expr {
                span: start.to(x.span),
                kind: ExprKind::Not(Box::new(x)),
            })
        } else {
            self.primary()
        };
        self.leave();
        r
    }

    fn primary(&mut self) -> PResult<Expr> {
        // Comparison in formula position: a theory atom, or a constant
        // comparison folded at grounding time.
        if let Some(theory) = self.attempt(|p| {
            let lhs = p.arith()?;
            let cmp = p.cmp_op().ok_or_else(|| p.unexpected("comparison"))?;
            Ok((lhs, cmp))
        }) {
            let (lhs, cmp) = theory;
            let rhs = self.arith()?;
            return Ok(Expr {
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Theory { cmp, lhs, rhs },
            });
        }

        let Some(tok) = self.toks.get(self.pos).cloned() else {
            return Err(self.expected_formula());
        };
        match tok.kind {
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.formula()?;
                let close = self.expect(&TokenKind::RParen, "')'")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: tok.span.to(close),
                })
            }
            TokenKind::Kw(Keyword::Top) => {
                self.pos += 1;
                Ok(Expr {
                    kind: ExprKind::True,
                    span: tok.span,
                })
            }
            TokenKind::Kw(Keyword::Bot) => {
                self.pos += 1;
                Ok(Expr {
                    kind: ExprKind::False,
                    span: tok.span,
                })
            }
            TokenKind::Kw(kw @ (Keyword::BigAnd | Keyword::BigOr)) => {
                self.pos += 1;
                let op = if kw == Keyword::BigAnd {
                    BigOp::And
                } else {
                    BigOp::Or
                };
                let (binders, when, body, end) = self.binder_block()?;
                Ok(Expr {
                    kind: ExprKind::Big {
                        op,
                        binders,
                        when,
                        body: Box::new(body),
                    },
                    span: tok.span.to(end),
                })
            }
            TokenKind::Kw(kw @ (Keyword::AtLeast | Keyword::AtMost | Keyword::Exact)) => {
                self.pos += 1;
                let kind = match kw {
                    Keyword::AtLeast => CardKind::AtLeast,
                    Keyword::AtMost => CardKind::AtMost,
                    _ => CardKind::Exact,
                };
                let k = self.arith()?;
                self.expect(&TokenKind::Comma, "',' after the cardinality bound")?;
                let (binders, when, body, end) = self.binder_block()?;
                Ok(Expr {
                    kind: ExprKind::Card {
                        kind,
                        k,
                        binders,
                        when,
                        body: Box::new(body),
                    },
                    span: tok.span.to(end),
                })
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                if self.numerics.contains_key(&name) {
                    return Err(Diagnostic::error(
                        format!("numeric symbol '{name}' used as a proposition"),
                        tok.span,
                    )
                    .with_note("numeric symbols may only appear inside comparisons"));
                }
                let (indices, end) = self.index_list()?;
                Ok(Expr {
                    kind: ExprKind::Atom { name, indices },
                    span: tok.span.to(end.unwrap_or(tok.span)),
                })
            }
            TokenKind::Var(var) => {
                self.pos += 1;
                let (indices, end) = self.index_list()?;
                Ok(Expr {
                    kind: ExprKind::VarAtom { var, indices },
                    span: tok.span.to(end.unwrap_or(tok.span)),
                })
            }
            _ => Err(self.expected_formula()),
        }
    }

    fn expected_formula(&self) -> Diagnostic {
        let after = self
            .pos
            .checked_sub(1)
            .and_then(|i| self.toks.get(i))
            .map(|t| format!(" after '{}'", t.kind))
            .unwrap_or_default();
        let found = match self.peek() {
            Some(k) => format!(", found '{k}'"),
            None => String::new(),
        };
        Diagnostic::error(format!("expected formula{after}{found}"), self.here())
    }

    /// Optional `( arith, ... )` directly after a predicate name.
    fn index_list(&mut self) -> PResult<(Vec<Arith>, Option<Span>)> {
        if self.peek() != Some(&TokenKind::LParen) || self.at_line_start() {
            return Ok((Vec::new(), None));
        }
        self.pos += 1;
        let mut indices = vec![self.arith()?];
        while self.eat(&TokenKind::Comma) {
            indices.push(self.arith()?);
        }
        let end = self.expect(&TokenKind::RParen, "',' or ')' in index list")?;
        Ok((indices, Some(end)))
    }

    fn binder_block(&mut self) -> PResult<(Vec<Binder>, Option<Cond>, Expr, Span)> {
        let mut binders = vec![self.binder()?];
        while self.eat(&TokenKind::Comma) {
            binders.push(self.binder()?);
        }
        for (i, b) in binders.iter().enumerate() {
            if binders[..i].iter().any(|o| o.var == b.var) {
                return Err(Diagnostic::error(
                    format!("variable {} is bound twice in the same binder list", b.var),
                    b.span,
                ));
            }
        }
        let when = if self.eat_kw(Keyword::When) {
            Some(self.cond()?)
        } else {
            None
        };
        if !self.eat(&TokenKind::Colon) {
            self.warnings.push(
                Diagnostic::warning("missing ':' before the body", self.here())
                    .with_note("write ':' between the binder list and the formula"),
            );
        }
        let body = self.formula()?;
        let end = self.expect(&TokenKind::Kw(Keyword::End), "'end'")?;
        Ok((binders, when, body, end))
    }

    fn binder(&mut self) -> PResult<Binder> {
        let t = match self.peek() {
            Some(TokenKind::Var(_)) => self.bump(),
            _ => return Err(self.unexpected("a '$' variable to bind")),
        };
        let TokenKind::Var(var) = t.kind else {
            unreachable!()
        };
        self.expect(&TokenKind::Kw(Keyword::In), "'in'")?;
        let set = self.set_expr()?;
        Ok(Binder {
            var,
            span: t.span.to(set.span),
            set,
        })
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek()? {
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::Le => CmpOp::Le,
            TokenKind::Ge => CmpOp::Ge,
            TokenKind::EqEq => CmpOp::Eq,
            TokenKind::NotEq => CmpOp::Ne,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    // -- conditions ---------------------------------------------------------

    fn cond(&mut self) -> PResult<Cond> {
        self.enter()?;
        let r = self.cond_or();
        self.leave();
        r
    }

    fn cond_or(&mut self) -> PResult<Cond> {
        let mut lhs = self.cond_and()?;
        while self.eat_kw(Keyword::Or) {
            let rhs = self.cond_and()?;
            lhs = Cond {
                span: lhs.span.to(rhs.span),
                kind: CondKind::Or(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn cond_and(&mut self) -> PResult<Cond> {
        let mut lhs = self.cond_not()?;
        while self.eat_kw(Keyword::And) {
            let rhs = self.cond_not()?;
            lhs = Cond {
                span: lhs.span.to(rhs.span),
                kind: CondKind::And(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn cond_not(&mut self) -> PResult<Cond> {
        self.enter()?;
        let r = if self.peek_kw(Keyword::Not) {
            let start = self.bump().span;
            self.cond_not().map(|c| Cond {
                span: start.to(c.span),
                kind: CondKind::Not(Box::new(c)),
            })
        } else {
            self.cond_primary()
        };
        self.leave();
        r
    }

    fn cond_primary(&mut self) -> PResult<Cond> {
        if let Some(lhs) = self.attempt(|p| {
            let a = p.arith()?;
            match p.peek() {
                Some(
                    TokenKind::Lt
                    | TokenKind::Gt
                    | TokenKind::Le
                    | TokenKind::Ge
                    | TokenKind::EqEq
                    | TokenKind::NotEq
                    | TokenKind::Kw(Keyword::In),
                ) => Ok(a),
                _ => Err(p.unexpected("comparison")),
            }
        }) {
            if self.eat_kw(Keyword::In) {
                let set = self.set_expr()?;
                return Ok(Cond {
                    span: lhs.span.to(set.span),
                    kind: CondKind::In(lhs, set),
                });
            }
            let op = self.cmp_op().expect("checked above");
            let rhs = self.arith()?;
            return Ok(Cond {
                span: lhs.span.to(rhs.span),
                kind: CondKind::Cmp(op, lhs, rhs),
            });
        }
        if self.peek() == Some(&TokenKind::LParen) {
            let open = self.bump().span;
            let inner = self.cond()?;
            let close = self.expect(&TokenKind::RParen, "')'")?;
            return Ok(Cond {
                kind: inner.kind,
                span: open.to(close),
            });
        }
        Err(self.unexpected("a condition"))
    }

    // -- sets ---------------------------------------------------------------

    fn set_expr(&mut self) -> PResult<SetExpr> {
        self.enter()?;
        let r = self.set_chain();
        self.leave();
        r
    }

    fn set_chain(&mut self) -> PResult<SetExpr> {
        let mut lhs = self.set_primary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Kw(Keyword::Union)) => SetOp::Union,
                Some(TokenKind::Kw(Keyword::Inter)) => SetOp::Inter,
                Some(TokenKind::Kw(Keyword::Diff)) => SetOp::Diff,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.set_primary()?;
            lhs = SetExpr {
                span: lhs.span.to(rhs.span),
                kind: SetKind::Bin(op, Box::new(lhs), Box::new(rhs)),
            };
        }
    }

    fn set_primary(&mut self) -> PResult<SetExpr> {
        match self.peek() {
            Some(TokenKind::Var(_)) => {
                let t = self.bump();
                let TokenKind::Var(name) = t.kind else {
                    unreachable!()
                };
                Ok(SetExpr {
                    kind: SetKind::Name(name),
                    span: t.span,
                })
            }
            Some(TokenKind::LParen) => {
                let open = self.bump().span;
                let kind = self.paren_set_body()?;
                let close = self.expect(&TokenKind::RParen, "')'")?;
                Ok(SetExpr {
                    kind,
                    span: open.to(close),
                })
            }
            _ => Err(self.unexpected("a set")),
        }
    }

    /// Contents of `( ... )` in set position: a range, a literal, or a
    /// parenthesized set expression.
    fn paren_set_body(&mut self) -> PResult<SetKind> {
        if self.peek() == Some(&TokenKind::RParen) {
            return Ok(SetKind::Literal(Vec::new()));
        }
        let start = self.pos;
        if let Some(first) = self.attempt(|p| p.arith()) {
            match self.peek() {
                Some(TokenKind::DotDot) => {
                    self.pos += 1;
                    let hi = self.arith()?;
                    return Ok(SetKind::Range(Box::new(first), Box::new(hi)));
                }
                Some(TokenKind::Comma) => {
                    let mut items = vec![first];
                    while self.eat(&TokenKind::Comma) {
                        if self.peek() == Some(&TokenKind::RParen) {
                            break;
                        }
                        items.push(self.arith()?);
                    }
                    return Ok(SetKind::Literal(items));
                }
                Some(TokenKind::RParen) if !matches!(first.kind, ArithKind::Var(_)) => {
                    return Err(Diagnostic::error(
                        "a one-element set literal needs a trailing comma",
                        first.span,
                    )
                    .with_note(format!("write ({},)", crate::render::render_arith(&first))));
                }
                _ => self.pos = start,
            }
        }
        Ok(self.set_expr()?.kind)
    }

    // -- arithmetic ---------------------------------------------------------

    fn arith(&mut self) -> PResult<Arith> {
        self.enter()?;
        let r = self.arith_sum();
        self.leave();
        r
    }

    fn arith_sum(&mut self) -> PResult<Arith> {
        let mut lhs = self.arith_term()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => ArithOp::Add,
                // A '-' opening a new line starts a new formula.
                Some(TokenKind::Minus) if !self.at_line_start() => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.arith_term()?;
            lhs = arith_bin(op, lhs, rhs);
        }
    }

    fn arith_term(&mut self) -> PResult<Arith> {
        let mut lhs = self.arith_factor()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => ArithOp::Mul,
                Some(TokenKind::Slash) => ArithOp::Div,
                Some(TokenKind::Kw(Keyword::Mod)) => ArithOp::Mod,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.arith_factor()?;
            lhs = arith_bin(op, lhs, rhs);
        }
    }

    fn arith_factor(&mut self) -> PResult<Arith> {
        if self.peek() != Some(&TokenKind::Minus) {
            return self.arith_primary();
        }
        let minus = self.bump().span;
        match self.peek() {
            Some(TokenKind::Int(n)) => {
                let n = *n;
                let t = self.bump();
                let value = i64::try_from(-(n as i128)).map_err(|_| {
                    Diagnostic::error("integer literal is too large", minus.to(t.span))
                })?;
                Ok(Arith {
                    kind: ArithKind::Const(Scalar::Int(value)),
                    span: minus.to(t.span),
                })
            }
            Some(TokenKind::Float(x)) => {
                let x = *x;
                let t = self.bump();
                Ok(Arith {
                    kind: ArithKind::Const(Scalar::Rat(-x)),
                    span: minus.to(t.span),
                })
            }
            _ => {
                self.enter()?;
                let operand = self.arith_factor();
                self.leave();
                let operand = operand?;
                let zero = Arith {
                    kind: ArithKind::Const(Scalar::Int(0)),
                    span: minus,
                };
                Ok(arith_bin(ArithOp::Sub, zero, operand))
            }
        }
    }

    fn arith_primary(&mut self) -> PResult<Arith> {
        let Some(tok) = self.toks.get(self.pos).cloned() else {
            return Err(self.unexpected("an expression"));
        };
        let at = |kind| Arith {
            kind,
            span: tok.span,
        };
        match tok.kind {
            TokenKind::Int(n) => {
                self.pos += 1;
                let v = i64::try_from(n)
                    .map_err(|_| Diagnostic::error("integer literal is too large", tok.span))?;
                Ok(at(ArithKind::Const(Scalar::Int(v))))
            }
            TokenKind::Float(x) => {
                self.pos += 1;
                Ok(at(ArithKind::Const(Scalar::Rat(x))))
            }
            TokenKind::Var(ref v) => {
                self.pos += 1;
                Ok(at(ArithKind::Var(v.clone())))
            }
            TokenKind::Ident(ref name) => {
                self.pos += 1;
                if self.numerics.contains_key(name) {
                    let (indices, end) = self.index_list()?;
                    Ok(Arith {
                        kind: ArithKind::NumTerm {
                            name: name.clone(),
                            indices,
                        },
                        span: tok.span.to(end.unwrap_or(tok.span)),
                    })
                } else {
                    Ok(at(ArithKind::Const(Scalar::Sym(name.clone()))))
                }
            }
            TokenKind::Kw(Keyword::Sqrt) => {
                self.pos += 1;
                self.expect(&TokenKind::LParen, "'(' after sqrt")?;
                let x = self.arith()?;
                let close = self.expect(&TokenKind::RParen, "')'")?;
                Ok(Arith {
                    kind: ArithKind::Sqrt(Box::new(x)),
                    span: tok.span.to(close),
                })
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.arith()?;
                let close = self.expect(&TokenKind::RParen, "')'")?;
                Ok(Arith {
                    kind: inner.kind,
                    span: tok.span.to(close),
                })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr {
        span: l.span.to(r.span),
        kind: ExprKind::Bin(op, Box::new(l), Box::new(r)),
    }
}

fn arith_bin(op: ArithOp, l: Arith, r: Arith) -> Arith {
    Arith {
        span: l.span.to(r.span),
        kind: ArithKind::Bin(op, Box::new(l), Box::new(r)),
    }
}
