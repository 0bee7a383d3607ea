//! Clausal encodings of at-least / at-most / exactly-k constraints over
//! DIMACS literals.

use std::fmt;
use std::str::FromStr;

/// Auto switches to the sequential counter above this many binomial clauses.
pub const BINOMIAL_LIMIT: u128 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CardEncoding {
    #[default]
    Auto,
    Binomial,
    SeqCounter,
}

impl FromStr for CardEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(CardEncoding::Auto),
            "binomial" => Ok(CardEncoding::Binomial),
            "seqcounter" => Ok(CardEncoding::SeqCounter),
            _ => Err(format!(
                "unknown encoding '{s}' (expected auto, binomial or seqcounter)"
            )),
        }
    }
}

impl fmt::Display for CardEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CardEncoding::Auto => "auto",
            CardEncoding::Binomial => "binomial",
            CardEncoding::SeqCounter => "seqcounter",
        })
    }
}

/// Source of fresh variables for the counter encoding.
pub trait VarAlloc {
    /// Allocates a new variable with a display name.
    fn alloc(&mut self, name: String) -> i32;
    /// A new id used to keep counter names of distinct constraints apart.
    fn next_constraint_id(&mut self) -> usize;
}

/// Plain allocator starting after `n` existing variables.
#[derive(Debug, Clone, Default)]
pub struct SimpleAlloc {
    pub next: i32,
    pub names: Vec<String>,
    constraints: usize,
}

impl SimpleAlloc {
    pub fn after(n: i32) -> Self {
        SimpleAlloc {
            next: n,
            names: Vec::new(),
            constraints: 0,
        }
    }
}

impl VarAlloc for SimpleAlloc {
    fn alloc(&mut self, name: String) -> i32 {
        self.next += 1;
        self.names.push(name);
        self.next
    }

    fn next_constraint_id(&mut self) -> usize {
        self.constraints += 1;
        self.constraints
    }
}

pub type Clause = Vec<i32>;

/// C(n, r), saturating.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn resolve(enc: CardEncoding, n: usize, k: usize) -> CardEncoding {
    match enc {
        CardEncoding::Auto if binomial(n, k + 1) <= BINOMIAL_LIMIT => CardEncoding::Binomial,
        CardEncoding::Auto => CardEncoding::SeqCounter,
        other => other,
    }
}

/// At most `k` of `lits` are true. Any `k` is accepted: `k >= n` yields no
/// clause and `k == 0` yields negated units.
pub fn encode_atmost(
    lits: &[i32],
    k: usize,
    enc: CardEncoding,
    fresh: &mut impl VarAlloc,
) -> Vec<Clause> {
    let n = lits.len();
    if k >= n {
        return Vec::new();
    }
    if k == 0 {
        return lits.iter().map(|&l| vec![-l]).collect();
    }
    match resolve(enc, n, k) {
        CardEncoding::SeqCounter => seq_counter(lits, k, fresh),
        _ => binomial_atmost(lits, k),
    }
}

/// At least `k` of `lits` are true; requires `k <= n`.
pub fn encode_atleast(
    lits: &[i32],
    k: usize,
    enc: CardEncoding,
    fresh: &mut impl VarAlloc,
) -> Vec<Clause> {
    let n = lits.len();
    assert!(k <= n, "atleast {k} of {n} literals is unsatisfiable");
    match k {
        0 => Vec::new(),
        1 => vec![lits.to_vec()],
        _ if k == n => lits.iter().map(|&l| vec![l]).collect(),
        _ => {
            let neg: Vec<i32> = lits.iter().map(|&l| -l).collect();
            encode_atmost(&neg, n - k, enc, fresh)
        }
    }
}

/// Exactly `k` of `lits` are true; requires `k <= n`.
pub fn encode_exact(
    lits: &[i32],
    k: usize,
    enc: CardEncoding,
    fresh: &mut impl VarAlloc,
) -> Vec<Clause> {
    let mut out = encode_atleast(lits, k, enc, fresh);
    out.extend(encode_atmost(lits, k, enc, fresh));
    out
}

/// One clause of negations per (k+1)-subset, subsets in lexicographic order.
fn binomial_atmost(lits: &[i32], k: usize) -> Vec<Clause> {
    let n = lits.len();
    let r = k + 1;
    let mut out = Vec::with_capacity(binomial(n, r).min(1 << 20) as usize);
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().map(|&i| -lits[i]).collect());
        // rightmost position that can still move
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sequential counter for 1 <= k < n. Register s(i,j) means "at least j
/// of the first i literals are true"; 2nk + n - 3k - 1 clauses.
fn seq_counter(x: &[i32], k: usize, fresh: &mut impl VarAlloc) -> Vec<Clause> {
    let n = x.len();
    let c = fresh.next_constraint_id();
    // s[i][j] for i in 0..n-1, j in 0..k
    let s: Vec<Vec<i32>> = (0..n - 1)
        .map(|i| {
            (0..k)
                .map(|j| fresh.alloc(format!("_S{c}_{}_{}", i + 1, j + 1)))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(2 * n * k + n);
    out.push(vec![-x[0], s[0][0]]);
    for j in 1..k {
        out.push(vec![-s[0][j]]);
    }
    for i in 1..n - 1 {
        out.push(vec![-x[i], s[i][0]]);
        out.push(vec![-s[i - 1][0], s[i][0]]);
        for j in 1..k {
            out.push(vec![-x[i], -s[i - 1][j - 1], s[i][j]]);
            out.push(vec![-s[i - 1][j], s[i][j]]);
        }
        out.push(vec![-x[i], -s[i - 1][k - 1]]);
    }
    out.push(vec![-x[n - 1], -s[n - 2][k - 1]]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(n: i32) -> Vec<i32> {
        (1..=n).collect()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn atmost_one_of_two() {
        let mut a = SimpleAlloc::after(2);
        assert_eq!(
            encode_atmost(&lits(2), 1, CardEncoding::Binomial, &mut a),
            vec![vec![-1, -2]]
        );
    }

    #[test]
    fn atmost_three_of_nine() {
        let mut a = SimpleAlloc::after(9);
        let cls = encode_atmost(&lits(9), 3, CardEncoding::Binomial, &mut a);
        assert_eq!(cls.len(), 126);
        assert!(cls.iter().all(|c| c.len() == 4 && c.iter().all(|&l| l < 0)));
        assert_eq!(a.next, 9);
    }

    #[test]
    fn atleast_shapes() {
        let mut a = SimpleAlloc::after(3);
        assert_eq!(
            encode_atleast(&lits(3), 1, CardEncoding::Auto, &mut a),
            vec![vec![1, 2, 3]]
        );
        assert_eq!(
            encode_atleast(&lits(3), 3, CardEncoding::Auto, &mut a),
            vec![vec![1], vec![2], vec![3]]
        );
    }

    #[test]
    fn exact_one_is_xor() {
        let mut a = SimpleAlloc::after(2);
        assert_eq!(
            encode_exact(&lits(2), 1, CardEncoding::Auto, &mut a),
            vec![vec![1, 2], vec![-1, -2]]
        );
        assert_eq!(
            encode_exact(&lits(2), 0, CardEncoding::Auto, &mut a),
            vec![vec![-1], vec![-2]]
        );
    }

    #[test]
    fn seq_counter_size() {
        for n in 2..=12usize {
            for k in 1..n {
                let mut a = SimpleAlloc::after(n as i32);
                let cls = encode_atmost(&lits(n as i32), k, CardEncoding::SeqCounter, &mut a);
                assert_eq!(cls.len(), 2 * n * k + n - 3 * k - 1, "n={n} k={k}");
                assert!(cls.len() <= 3 * n * k + n);
                assert_eq!(a.names.len(), (n - 1) * k);
            }
        }
    }

    #[test]
    fn counter_names_are_reserved_and_distinct() {
        let mut a = SimpleAlloc::after(4);
        encode_atmost(&lits(4), 2, CardEncoding::SeqCounter, &mut a);
        encode_atmost(&lits(4), 2, CardEncoding::SeqCounter, &mut a);
        assert_eq!(a.names[0], "_S1_1_1");
        assert!(a.names.contains(&"_S2_3_2".to_string()));
        let mut sorted = a.names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), a.names.len());
    }

    #[test]
    fn auto_switches_on_size() {
        let mut a = SimpleAlloc::after(20);
        let cls = encode_atmost(&lits(20), 5, CardEncoding::Auto, &mut a);
        // C(20,6) = 38760 > 500
        assert!(!a.names.is_empty());
        assert_eq!(cls.len(), 2 * 20 * 5 + 20 - 15 - 1);
        let mut b = SimpleAlloc::after(9);
        encode_atmost(&lits(9), 3, CardEncoding::Auto, &mut b);
        assert!(b.names.is_empty());
    }

    #[test]
    fn parse_encoding() {
        assert_eq!("seqcounter".parse::<CardEncoding>(), Ok(CardEncoding::SeqCounter));
        assert!("totalizer".parse::<CardEncoding>().is_err());
    }
}
