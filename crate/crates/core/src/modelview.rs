//! Model display: decoded rows in natural order, with regex and polarity
//! filtering.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::VarMap;
use crate::sat::Model;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub atom: String,
    pub value: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    All,
    TrueOnly,
    FalseOnly,
}

impl Polarity {
    fn admits(self, v: bool) -> bool {
        match self {
            Polarity::All => true,
            Polarity::TrueOnly => v,
            Polarity::FalseOnly => !v,
        }
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "" | "all" => Ok(Polarity::All),
            "true" | "true-only" => Ok(Polarity::TrueOnly),
            "false" | "false-only" => Ok(Polarity::FalseOnly),
            other => Err(format!("unknown polarity '{other}' (expected all, true or false)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid filter pattern: {0}")]
pub struct FilterError(pub String);

/// Rows sorted in natural order; generated `_` atoms are never shown.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct ModelView {
    pub rows: Vec<Row>,
}

impl ModelView {
    pub fn from_rows(rows: impl IntoIterator<Item = (String, bool)>) -> Self {
        let mut rows: Vec<Row> = rows
            .into_iter()
            .filter(|(a, _)| !a.starts_with('_'))
            .map(|(atom, value)| Row { atom, value })
            .collect();
        rows.sort_by(|a, b| natural_cmp(&a.atom, &b.atom));
        ModelView { rows }
    }

    /// One row per user atom of `vm`.
    pub fn decode(m: &Model, vm: &VarMap) -> Self {
        Self::from_rows(vm.user_atoms().map(|(v, name)| (name.to_string(), m.lit(v))))
    }

    /// Keeps rows whose atom text contains a match of `pattern` and whose
    /// value fits `polarity`. An empty pattern matches everything.
    pub fn apply_filter(&self, pattern: &str, polarity: Polarity) -> Result<ModelView, FilterError> {
        let m = NameMatcher::new(pattern)?;
        let rows = self
            .rows
            .iter()
            .filter(|r| polarity.admits(r.value) && m.matches(&r.atom))
            .cloned()
            .collect();
        Ok(ModelView { rows })
    }

    pub fn true_count(&self) -> usize {
        self.rows.iter().filter(|r| r.value).count()
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.rows.iter().find(|r| r.atom == atom).map(|r| r.value)
    }
}

impl fmt::Display for ModelView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{} = {}", r.atom, r.value)?;
        }
        Ok(())
    }
}

/// Unanchored regex search over names; the empty pattern matches all.
#[derive(Debug, Clone)]
pub struct NameMatcher(Option<Regex>);

impl NameMatcher {
    pub fn new(pattern: &str) -> Result<Self, FilterError> {
        if pattern.is_empty() {
            return Ok(NameMatcher(None));
        }
        Regex::new(pattern).map(|r| NameMatcher(Some(r))).map_err(|e| FilterError(e.to_string()))
    }

    pub fn matches(&self, name: &str) -> bool {
        self.0.as_ref().is_none_or(|re| re.is_match(name))
    }
}

/// Compares text with digit runs ordered by numeric value, so `P(2)`
/// sorts before `P(10)`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let nx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let ny = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let trim = |s: &[u8]| -> usize { s.iter().take_while(|&&c| c == b'0').count() };
                let (dx, dy) = (&x[trim(&x[..nx]).min(nx)..nx], &y[trim(&y[..ny]).min(ny)..ny]);
                let ord = dx.len().cmp(&dy.len()).then_with(|| dx.cmp(dy));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[nx..];
                y = &y[ny..];
            }
            (Some(c), Some(d)) => {
                if c != d {
                    return c.cmp(d);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(rows: &[(&str, bool)]) -> ModelView {
        ModelView::from_rows(rows.iter().map(|(a, v)| (a.to_string(), *v)))
    }

    #[test]
    fn natural_order() {
        let v = view(&[("P(10,1)", true), ("P(2,1)", false), ("Q", true), ("P(2,10)", true), ("P(2,9)", true)]);
        let atoms: Vec<&str> = v.rows.iter().map(|r| r.atom.as_str()).collect();
        assert_eq!(atoms, ["P(2,1)", "P(2,9)", "P(2,10)", "P(10,1)", "Q"]);
        assert_eq!(natural_cmp("x007", "x7"), Ordering::Less);
    }

    #[test]
    fn hides_generated() {
        let v = view(&[("_T1", true), ("p", false), ("_S1_1_1", true)]);
        assert_eq!(v.rows.len(), 1);
    }

    #[test]
    fn filtering() {
        let v = view(&[("A(1)", true), ("B(1)", true), ("A(2)", false)]);
        assert_eq!(v.apply_filter("^A", Polarity::All).unwrap().rows.len(), 2);
        assert_eq!(v.apply_filter("^A", Polarity::TrueOnly).unwrap().rows.len(), 1);
        assert_eq!(v.apply_filter("", Polarity::FalseOnly).unwrap().rows.len(), 1);
        assert_eq!(v.apply_filter("1", Polarity::All).unwrap().rows.len(), 2);
        assert!(v.apply_filter("([", Polarity::All).is_err());
        let once = v.apply_filter("A", Polarity::TrueOnly).unwrap();
        assert_eq!(once.apply_filter("A", Polarity::TrueOnly).unwrap(), once);
    }

    #[test]
    fn json_shape() {
        let v = view(&[("p", true)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[{"atom":"p","value":true}]"#);
    }
}
