//! Exact linear forms over theory variables.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{smt_number, smt_symbol, SmtError};
use crate::ast::{ArithOp, CmpOp, NumSort};
use crate::ground::GTerm;
use crate::value::{format_rat, Scalar};

/// `sum(coefs[v] * v) + constant`, with zero coefficients removed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    pub coefs: BTreeMap<String, BigRational>,
    pub constant: BigRational,
}

impl Affine {
    fn constant(c: BigRational) -> Self {
        Affine {
            coefs: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(name: &str) -> Self {
        let mut coefs = BTreeMap::new();
        coefs.insert(name.to_string(), BigRational::one());
        Affine {
            coefs,
            constant: BigRational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coefs.is_empty()
    }

    pub fn add(&self, o: &Affine) -> Affine {
        let mut out = self.clone();
        for (v, c) in &o.coefs {
            let e = out.coefs.entry(v.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                out.coefs.remove(v);
            }
        }
        out.constant += &o.constant;
        out
    }

    pub fn scale(&self, k: &BigRational) -> Affine {
        if k.is_zero() {
            return Affine::default();
        }
        Affine {
            coefs: self.coefs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        self.add(&o.scale(&-BigRational::one()))
    }

    /// `x - y` or `x` plus a constant, the shapes of difference logic.
    pub fn is_difference(&self) -> bool {
        let one = BigRational::one();
        let cs: Vec<&BigRational> = self.coefs.values().collect();
        match cs.as_slice() {
            [c] => c.abs() == one,
            [a, b] => (**a == one && **b == -one.clone()) || (**a == -one.clone() && **b == one),
            _ => false,
        }
    }

    /// Renders `self cmp 0` as an SMT-LIB atom, moving the constant to the
    /// right-hand side. Difference shapes become `(op x y)`,
    /// `(op (- x y) c)` or `(op x c)`.
    pub fn to_smt_atom(&self, cmp: CmpOp, sort: NumSort) -> String {
        let rhs = -self.constant.clone();
        let one = BigRational::one();
        let mut cmp = cmp;
        let lhs = if self.is_difference() {
            let pos: Vec<&String> = self.coefs.iter().filter(|(_, c)| **c == one).map(|(v, _)| v).collect();
            let neg: Vec<&String> = self.coefs.iter().filter(|(_, c)| **c != one).map(|(v, _)| v).collect();
            match (pos.as_slice(), neg.as_slice()) {
                ([x], [y]) if rhs.is_zero() => {
                    return apply(cmp, &smt_symbol(x), &smt_symbol(y));
                }
                ([x], [y]) => format!("(- {} {})", smt_symbol(x), smt_symbol(y)),
                ([x], []) => smt_symbol(x),
                ([], [y]) => {
                    // -y op r  <=>  y op' -r
                    cmp = flip(cmp);
                    return apply(cmp, &smt_symbol(y), &smt_number(&-rhs, sort));
                }
                _ => unreachable!("difference shape"),
            }
        } else {
            let terms: Vec<String> = self
                .coefs
                .iter()
                .map(|(v, c)| {
                    let s = smt_symbol(v);
                    if *c == one {
                        s
                    } else if *c == -one.clone() {
                        format!("(- {s})")
                    } else {
                        format!("(* {} {s})", smt_number(c, sort))
                    }
                })
                .collect();
            if terms.len() == 1 {
                terms.into_iter().next().unwrap()
            } else {
                format!("(+ {})", terms.join(" "))
            }
        };
        apply(cmp, &lhs, &smt_number(&rhs, sort))
    }
}

fn apply(cmp: CmpOp, a: &str, b: &str) -> String {
    let op = match cmp {
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
        CmpOp::Eq => "=",
        CmpOp::Ne => "distinct",
    };
    format!("({op} {a} {b})")
}

/// Mirror image: `a op b` iff `b flip(op) a`.
fn flip(cmp: CmpOp) -> CmpOp {
    match cmp {
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Lt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Ge => CmpOp::Le,
        other => other,
    }
}

/// Exact value of a numeric scalar. Rationals are read from their decimal
/// text, so `0.1` is exactly one tenth.
pub fn scalar_rational(s: &Scalar) -> Option<BigRational> {
    match s {
        Scalar::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
        Scalar::Rat(r) if r.is_finite() => decimal(&format_rat(*r)),
        _ => None,
    }
}

fn decimal(text: &str) -> Option<BigRational> {
    let (neg, t) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(digits, den);
    Some(if neg { -v } else { v })
}

/// Linear form of a ground term, or an error for terms outside linear
/// arithmetic of `sort`.
pub fn linearize(t: &GTerm, sort: NumSort) -> Result<Affine, SmtError> {
    let unsupported = |reason: &str| SmtError::Unsupported {
        term: t.to_string(),
        reason: reason.to_string(),
    };
    Ok(match t {
        GTerm::Num(s) => {
            let v = scalar_rational(s).ok_or_else(|| unsupported("not a finite number"))?;
            if sort == NumSort::Int && !v.is_integer() {
                return Err(unsupported("fractional constant in integer arithmetic"));
            }
            Affine::constant(v)
        }
        GTerm::Var(v) => Affine::var(&v.name),
        GTerm::Sqrt(_) => return Err(SmtError::Nonlinear(t.to_string())),
        GTerm::Bin(op, a, b) => {
            let a = linearize(a, sort)?;
            let b = linearize(b, sort)?;
            match op {
                ArithOp::Add => a.add(&b),
                ArithOp::Sub => a.sub(&b),
                ArithOp::Mul if a.is_constant() => b.scale(&a.constant),
                ArithOp::Mul if b.is_constant() => a.scale(&b.constant),
                ArithOp::Mul => return Err(SmtError::Nonlinear(t.to_string())),
                ArithOp::Div if sort == NumSort::Int => {
                    return Err(unsupported("division in integer arithmetic"))
                }
                ArithOp::Div if !b.is_constant() => return Err(SmtError::Nonlinear(t.to_string())),
                ArithOp::Div if b.constant.is_zero() => return Err(unsupported("division by zero")),
                ArithOp::Div => a.scale(&b.constant.recip()),
                ArithOp::Mod => return Err(unsupported("modulo of a theory term")),
            }
        }
    })
}

/// Exact value of a term under `value` for its variables.
pub fn eval_term(t: &GTerm, value: &dyn Fn(&str) -> BigRational) -> Result<BigRational, SmtError> {
    let unsupported = |reason: &str| SmtError::Unsupported {
        term: t.to_string(),
        reason: reason.to_string(),
    };
    Ok(match t {
        GTerm::Num(s) => scalar_rational(s).ok_or_else(|| unsupported("not a finite number"))?,
        GTerm::Var(v) => value(&v.name),
        GTerm::Sqrt(_) => return Err(unsupported("square root cannot be evaluated exactly")),
        GTerm::Bin(op, a, b) => {
            let a = eval_term(a, value)?;
            let b = eval_term(b, value)?;
            match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
                ArithOp::Div if b.is_zero() => return Err(unsupported("division by zero")),
                ArithOp::Div => a / b,
                ArithOp::Mod => return Err(unsupported("modulo of a theory term")),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        let r = scalar_rational(&Scalar::Rat(0.1)).unwrap();
        assert_eq!(r, BigRational::new(1.into(), 10.into()));
        let r = scalar_rational(&Scalar::Rat(-2.5)).unwrap();
        assert_eq!(r, BigRational::new((-5).into(), 2.into()));
    }

    #[test]
    fn difference_shapes() {
        let x = Affine::var("x");
        let y = Affine::var("y");
        assert!(x.sub(&y).is_difference());
        assert!(y.sub(&x).is_difference());
        assert!(x.is_difference());
        assert!(!x.add(&y).is_difference());
        assert!(!x.scale(&BigRational::from_integer(2.into())).is_difference());
        let five = Affine::constant(BigRational::from_integer(5.into()));
        // 5 - x < 0  <=>  x > 5
        assert_eq!(five.sub(&x).to_smt_atom(CmpOp::Lt, NumSort::Int), "(> x 5)");
    }
}
