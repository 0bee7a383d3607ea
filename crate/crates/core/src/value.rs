//! Scalars and finite domain sets.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A set element or the value of an index expression.
#[derive(Debug, Clone)]
pub enum Scalar {
    Int(i64),
    /// Double precision; equality is exact after evaluation.
    Rat(f64),
    Sym(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot compare {left} with {right}")]
pub struct KindMismatch {
    pub left: &'static str,
    pub right: &'static str,
}

impl Scalar {
    pub fn sym(s: impl Into<String>) -> Self {
        Scalar::Sym(s.into())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Scalar::Int(_) => "integer",
            Scalar::Rat(_) => "rational",
            Scalar::Sym(_) => "symbol",
        }
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self, Scalar::Sym(_))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Scalar::Int(i) => Some(i as f64),
            Scalar::Rat(r) => Some(r),
            Scalar::Sym(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            Scalar::Int(i) => Some(i),
            _ => None,
        }
    }

    /// Ordering within a kind. Int and Rat are one numeric kind; symbols
    /// order lexicographically; numbers and symbols do not compare.
    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, KindMismatch> {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Ok(a.cmp(b)),
            (Scalar::Sym(a), Scalar::Sym(b)) => Ok(a.cmp(b)),
            (Scalar::Sym(_), _) | (_, Scalar::Sym(_)) => Err(KindMismatch {
                left: self.kind_name(),
                right: other.kind_name(),
            }),
            _ => {
                let (a, b) = (self.as_f64().unwrap(), other.as_f64().unwrap());
                Ok(a.total_cmp(&b))
            }
        }
    }

    /// Equality as used in conditions: a kind mismatch is an error.
    pub fn try_eq(&self, other: &Scalar) -> Result<bool, KindMismatch> {
        match (self, other) {
            (Scalar::Sym(a), Scalar::Sym(b)) => Ok(a == b),
            (Scalar::Sym(_), _) | (_, Scalar::Sym(_)) => Err(KindMismatch {
                left: self.kind_name(),
                right: other.kind_name(),
            }),
            _ => Ok(self == other),
        }
    }

    /// Text used inside ground atom names and SMT symbols.
    pub fn index_text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Rat(r) => format_rat(*r),
            Scalar::Sym(s) => s.clone(),
        }
    }
}

/// Membership and set equality: numbers compare numerically, a number is
/// never equal to a symbol.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (Scalar::Sym(a), Scalar::Sym(b)) => a == b,
            (Scalar::Sym(_), _) | (_, Scalar::Sym(_)) => false,
            _ => self.as_f64().unwrap().to_bits() == other.as_f64().unwrap().to_bits(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.index_text())
    }
}

/// Renders a double so that it lexes back as a rational literal
/// (always with a fractional part, never in exponent form).
pub fn format_rat(r: f64) -> String {
    // Display is shortest-round-trip and never uses exponent notation.
    let s = format!("{r}");
    if s.contains('.') || !r.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Finite ordered collection of scalars without duplicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SetValue {
    elements: Vec<Scalar>,
}

impl SetValue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set keeping the first occurrence of each element.
    pub fn from_elements(elements: impl IntoIterator<Item = Scalar>) -> Self {
        let mut set = SetValue::new();
        for e in elements {
            set.insert(e);
        }
        set
    }

    /// Ascending integer range; empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        SetValue {
            elements: (lo..=hi).map(Scalar::Int).collect(),
        }
    }

    pub fn insert(&mut self, e: Scalar) -> bool {
        if self.contains(&e) {
            false
        } else {
            self.elements.push(e);
            true
        }
    }

    pub fn contains(&self, e: &Scalar) -> bool {
        self.elements.iter().any(|x| x == e)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &[Scalar] {
        &self.elements
    }

    pub fn union(&self, other: &SetValue) -> SetValue {
        let mut out = self.clone();
        for e in other.iter() {
            out.insert(e.clone());
        }
        out
    }

    pub fn intersection(&self, other: &SetValue) -> SetValue {
        SetValue {
            elements: self.iter().filter(|e| other.contains(e)).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &SetValue) -> SetValue {
        SetValue {
            elements: self.iter().filter(|e| !other.contains(e)).cloned().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a SetValue {
    type Item = &'a Scalar;
    type IntoIter = std::slice::Iter<'a, Scalar>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_and_rat_compare_numerically() {
        assert_eq!(Scalar::Int(3), Scalar::Rat(3.0));
        assert_eq!(
            Scalar::Int(2).try_cmp(&Scalar::Rat(2.5)),
            Ok(Ordering::Less)
        );
    }

    #[test]
    fn symbol_vs_number_ordering_is_an_error() {
        assert!(Scalar::sym("A").try_cmp(&Scalar::Int(1)).is_err());
        assert!(Scalar::sym("A").try_eq(&Scalar::Int(1)).is_err());
        assert_ne!(Scalar::sym("A"), Scalar::Int(1));
    }

    #[test]
    fn symbols_order_lexicographically() {
        assert_eq!(
            Scalar::sym("A").try_cmp(&Scalar::sym("B")),
            Ok(Ordering::Less)
        );
    }

    #[test]
    fn set_keeps_insertion_order_and_drops_duplicates() {
        let s = SetValue::from_elements([
            Scalar::sym("B"),
            Scalar::Int(1),
            Scalar::sym("B"),
            Scalar::Rat(1.0),
        ]);
        assert_eq!(s.elements(), &[Scalar::sym("B"), Scalar::Int(1)]);
    }

    #[test]
    fn empty_range() {
        assert!(SetValue::range(1, 0).is_empty());
        assert_eq!(SetValue::range(1, 3).len(), 3);
    }

    #[test]
    fn rat_formatting_round_trips_as_literal() {
        assert_eq!(format_rat(3.0), "3.0");
        assert_eq!(format_rat(2.5), "2.5");
        assert!(!format_rat(1e20).contains('e'));
        assert!(format_rat(1e20).contains('.'));
        assert_eq!(format_rat(1e20).parse::<f64>().unwrap(), 1e20);
        assert_eq!(format_rat(1e-20).parse::<f64>().unwrap(), 1e-20);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("P"));
        assert!(is_identifier("a_1"));
        assert!(!is_identifier("_T1"));
        assert!(!is_identifier("1a"));
        assert!(!is_identifier(""));
    }
}
