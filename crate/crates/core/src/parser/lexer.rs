use std::fmt;

use crate::ast::Span;
use crate::diag::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    BigAnd,
    BigOr,
    AtLeast,
    AtMost,
    Exact,
    When,
    In,
    And,
    Or,
    Not,
    End,
    Int,
    Real,
    Sets,
    Formulas,
    Mod,
    Sqrt,
    Union,
    Inter,
    Diff,
    Top,
    Bot,
}

impl Keyword {
    fn from_word(w: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match w {
            "bigand" => BigAnd,
            "bigor" => BigOr,
            "atleast" => AtLeast,
            "atmost" => AtMost,
            "exact" => Exact,
            "when" => When,
            "in" => In,
            "and" => And,
            "or" => Or,
            "not" => Not,
            "end" => End,
            "int" => Int,
            "real" => Real,
            "sets" => Sets,
            "formulas" => Formulas,
            "mod" => Mod,
            "sqrt" => Sqrt,
            "union" => Union,
            "inter" => Inter,
            "diff" => Diff,
            "Top" => Top,
            "Bot" => Bot,
            _ => return None,
        })
    }

    pub fn text(self) -> &'static str {
        use Keyword::*;
        match self {
            BigAnd => "bigand",
            BigOr => "bigor",
            AtLeast => "atleast",
            AtMost => "atmost",
            Exact => "exact",
            When => "when",
            In => "in",
            And => "and",
            Or => "or",
            Not => "not",
            End => "end",
            Int => "int",
            Real => "real",
            Sets => "sets",
            Formulas => "formulas",
            Mod => "mod",
            Sqrt => "sqrt",
            Union => "union",
            Inter => "inter",
            Diff => "diff",
            Top => "Top",
            Bot => "Bot",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Kw(Keyword),
    Ident(String),
    /// `$name`, stored with the `$`.
    Var(String),
    /// Unsigned; sign handling happens in the parser.
    Int(u64),
    Float(f64),
    Implies,
    Iff,
    EqEq,
    NotEq,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,
    DotDot,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Kw(k) => f.write_str(k.text()),
            Ident(s) | Var(s) => f.write_str(s),
            Int(i) => write!(f, "{i}"),
            Float(x) => write!(f, "{x}"),
            Implies => f.write_str("=>"),
            Iff => f.write_str("<=>"),
            EqEq => f.write_str("=="),
            NotEq => f.write_str("!="),
            Le => f.write_str("<="),
            Ge => f.write_str(">="),
            Lt => f.write_str("<"),
            Gt => f.write_str(">"),
            Plus => f.write_str("+"),
            Minus => f.write_str("-"),
            Star => f.write_str("*"),
            Slash => f.write_str("/"),
            LParen => f.write_str("("),
            RParen => f.write_str(")"),
            Comma => f.write_str(","),
            Colon => f.write_str(":"),
            Assign => f.write_str("="),
            DotDot => f.write_str(".."),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// True when the token is the first one on its line.
    pub line_start: bool,
}

/// Splits source text into tokens. `;;` starts a comment running to the end
/// of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line_start = true;

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b';' && bytes.get(i + 1) == Some(&b';') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }

        let start = i;
        let kind = if c.is_ascii_alphabetic() {
            i = scan_word(bytes, i);
            let word = &src[start..i];
            match Keyword::from_word(word) {
                Some(k) => TokenKind::Kw(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c == b'_' {
            let end = scan_word(bytes, i);
            return Err(Diagnostic::error(
                format!("identifier '{}' is reserved", &src[start..end]),
                Span::new(start, end),
            )
            .with_note("names starting with '_' are reserved for generated atoms"));
        } else if c == b'$' {
            i += 1;
            if i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i = scan_word(bytes, i);
                TokenKind::Var(src[start..i].to_string())
            } else {
                return Err(Diagnostic::error(
                    "expected a variable name after '$'",
                    Span::new(start, i),
                ));
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let is_float = bytes.get(i) == Some(&b'.')
                && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit());
            if is_float {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                // Only reached with `digits.digits`, which always parses.
                TokenKind::Float(src[start..i].parse().unwrap_or(0.0))
            } else {
                match src[start..i].parse::<u64>() {
                    Ok(n) => TokenKind::Int(n),
                    Err(_) => {
                        return Err(Diagnostic::error(
                            "integer literal is too large",
                            Span::new(start, i),
                        ))
                    }
                }
            }
        } else {
            let two = bytes.get(i + 1).copied();
            let three = bytes.get(i + 2).copied();
            let (kind, len) = match (c, two, three) {
                (b'<', Some(b'='), Some(b'>')) => (TokenKind::Iff, 3),
                (b'=', Some(b'>'), _) => (TokenKind::Implies, 2),
                (b'=', Some(b'='), _) => (TokenKind::EqEq, 2),
                (b'!', Some(b'='), _) => (TokenKind::NotEq, 2),
                (b'<', Some(b'='), _) => (TokenKind::Le, 2),
                (b'>', Some(b'='), _) => (TokenKind::Ge, 2),
                (b'.', Some(b'.'), _) => (TokenKind::DotDot, 2),
                (b'<', ..) => (TokenKind::Lt, 1),
                (b'>', ..) => (TokenKind::Gt, 1),
                (b'+', ..) => (TokenKind::Plus, 1),
                (b'-', ..) => (TokenKind::Minus, 1),
                (b'*', ..) => (TokenKind::Star, 1),
                (b'/', ..) => (TokenKind::Slash, 1),
                (b'(', ..) => (TokenKind::LParen, 1),
                (b')', ..) => (TokenKind::RParen, 1),
                (b',', ..) => (TokenKind::Comma, 1),
                (b':', ..) => (TokenKind::Colon, 1),
                (b'=', ..) => (TokenKind::Assign, 1),
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(Diagnostic::error(
                        format!("unexpected character '{}'", ch.escape_default()),
                        Span::new(i, i + ch.len_utf8()),
                    ));
                }
            };
            i += len;
            kind
        };
        toks.push(Token {
            kind,
            span: Span::new(start, i),
            line_start,
        });
        line_start = false;
    }
    Ok(toks)
}

fn scan_word(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
    }
    i
}
