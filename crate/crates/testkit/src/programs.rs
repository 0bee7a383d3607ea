//! Random source programs paired with a direct evaluator.
//!
//! The evaluator interprets binders, `when` filters and cardinality
//! constraints by iterating over domains at evaluation time, without
//! producing a ground formula. Comparing its model set with the truth
//! table of the grounder's output checks the grounder independently.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use twist_core::ast::{CardKind, CmpOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Val {
    Int(i64),
    Sym(String),
}

impl Val {
    pub fn text(&self) -> String {
        match self {
            Val::Int(i) => i.to_string(),
            Val::Sym(s) => s.clone(),
        }
    }

    fn is_int(&self) -> bool {
        matches!(self, Val::Int(_))
    }
}

#[derive(Debug, Clone)]
pub enum IExpr {
    Const(Val),
    Var(String),
    /// `$v + c` for an integer variable.
    Offset(String, i64),
}

#[derive(Debug, Clone)]
pub enum SetRef {
    Named(usize),
    /// `(lo..hi)`; `lo` may be a binder of an enclosing or earlier binder.
    Range(IExpr, i64),
    Literal(Vec<Val>),
}

#[derive(Debug, Clone)]
pub struct Binder {
    pub var: String,
    pub set: SetRef,
}

#[derive(Debug, Clone)]
pub enum RCond {
    Cmp(CmpOp, IExpr, IExpr),
    Not(Box<RCond>),
    And(Box<RCond>, Box<RCond>),
    Or(Box<RCond>, Box<RCond>),
}

#[derive(Debug, Clone)]
pub enum RF {
    Top,
    Bot,
    Atom(usize, Vec<IExpr>),
    Not(Box<RF>),
    And(Box<RF>, Box<RF>),
    Or(Box<RF>, Box<RF>),
    Impl(Box<RF>, Box<RF>),
    Iff(Box<RF>, Box<RF>),
    Big {
        and: bool,
        binders: Vec<Binder>,
        when: Option<RCond>,
        body: Box<RF>,
    },
    Card {
        kind: CardKind,
        k: i64,
        binders: Vec<Binder>,
        when: Option<RCond>,
        body: Box<RF>,
    },
}

#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct RandomProgram {
    pub sets: Vec<(String, Vec<Val>)>,
    pub families: Vec<Family>,
    pub formula: RF,
    /// Print a `formulas:` header.
    pub header: bool,
}

type Env = Vec<(String, Val)>;

impl RandomProgram {
    pub fn source(&self) -> String {
        let mut s = String::new();
        for (name, vals) in &self.sets {
            let body = match vals.len() {
                0 => "()".to_string(),
                1 => format!("({},)", vals[0].text()),
                _ => format!("({})", vals.iter().map(Val::text).collect::<Vec<_>>().join(", ")),
            };
            writeln!(s, "${name} = {body}").unwrap();
        }
        if self.header {
            s.push_str("formulas:\n");
        }
        // Top-level conjunctions go on separate lines.
        let mut tops = Vec::new();
        split_and(&self.formula, &mut tops);
        for f in tops {
            writeln!(s, "{}", self.render(f)).unwrap();
        }
        s
    }

    fn render(&self, f: &RF) -> String {
        let bin = |a: &RF, op: &str, b: &RF| format!("({} {op} {})", self.render(a), self.render(b));
        match f {
            RF::Top => "Top".into(),
            RF::Bot => "Bot".into(),
            RF::Atom(fam, idx) => {
                let fam = &self.families[*fam];
                if idx.is_empty() {
                    fam.name.clone()
                } else {
                    let parts: Vec<String> = idx.iter().map(render_iexpr).collect();
                    format!("{}({})", fam.name, parts.join(", "))
                }
            }
            RF::Not(x) => format!("not ({})", self.render(x)),
            RF::And(a, b) => bin(a, "and", b),
            RF::Or(a, b) => bin(a, "or", b),
            RF::Impl(a, b) => bin(a, "=>", b),
            RF::Iff(a, b) => bin(a, "<=>", b),
            RF::Big {
                and,
                binders,
                when,
                body,
            } => format!(
                "{} {}: {} end",
                if *and { "bigand" } else { "bigor" },
                self.render_binders(binders, when),
                self.render(body)
            ),
            RF::Card {
                kind,
                k,
                binders,
                when,
                body,
            } => format!(
                "{} {k}, {}: {} end",
                kind.keyword(),
                self.render_binders(binders, when),
                self.render(body)
            ),
        }
    }

    fn render_binders(&self, binders: &[Binder], when: &Option<RCond>) -> String {
        let mut parts = Vec::new();
        for b in binders {
            let set = match &b.set {
                SetRef::Named(i) => format!("${}", self.sets[*i].0),
                SetRef::Range(lo, hi) => format!("({}..{hi})", render_iexpr(lo)),
                SetRef::Literal(vals) if vals.len() == 1 => format!("({},)", vals[0].text()),
                SetRef::Literal(vals) => {
                    format!("({})", vals.iter().map(Val::text).collect::<Vec<_>>().join(", "))
                }
            };
            parts.push(format!("${} in {set}", b.var));
        }
        let mut s = parts.join(", ");
        if let Some(c) = when {
            write!(s, " when {}", render_cond(c)).unwrap();
        }
        s
    }

    /// Every atom text the program can mention under any binding.
    pub fn universe(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        self.collect(&self.formula, &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    fn collect(&self, f: &RF, env: &mut Env, out: &mut BTreeSet<String>) {
        match f {
            RF::Top | RF::Bot => {}
            RF::Atom(..) => {
                out.insert(self.atom_text(f, env));
            }
            RF::Not(x) => self.collect(x, env, out),
            RF::And(a, b) | RF::Or(a, b) | RF::Impl(a, b) | RF::Iff(a, b) => {
                self.collect(a, env, out);
                self.collect(b, env, out);
            }
            RF::Big {
                binders, when, body, ..
            }
            | RF::Card {
                binders, when, body, ..
            } => {
                for mut e in self.instances(binders, when, env) {
                    self.collect(body, &mut e, out);
                }
            }
        }
    }

    fn atom_text(&self, f: &RF, env: &Env) -> String {
        let RF::Atom(fam, idx) = f else { unreachable!() };
        let name = &self.families[*fam].name;
        if idx.is_empty() {
            return name.clone();
        }
        let parts: Vec<String> = idx.iter().map(|i| eval_iexpr(i, env).text()).collect();
        format!("{name}({})", parts.join(","))
    }

    /// Extended environments for every binding that passes `when`, in
    /// nested-loop order.
    fn instances(&self, binders: &[Binder], when: &Option<RCond>, env: &Env) -> Vec<Env> {
        let mut out = Vec::new();
        let mut cur = env.clone();
        self.bind_from(binders, when, &mut cur, &mut out);
        out
    }

    fn bind_from(&self, binders: &[Binder], when: &Option<RCond>, env: &mut Env, out: &mut Vec<Env>) {
        let Some((b, rest)) = binders.split_first() else {
            if when.as_ref().is_none_or(|c| eval_cond(c, env)) {
                out.push(env.clone());
            }
            return;
        };
        let dom: Vec<Val> = match &b.set {
            SetRef::Named(i) => self.sets[*i].1.clone(),
            SetRef::Range(lo, hi) => match eval_iexpr(lo, env) {
                Val::Int(lo) => (lo..=*hi).map(Val::Int).collect(),
                Val::Sym(_) => panic!("symbolic range bound"),
            },
            SetRef::Literal(v) => v.clone(),
        };
        for v in dom {
            env.push((b.var.clone(), v));
            self.bind_from(rest, when, env, out);
            env.pop();
        }
    }

    /// Truth value under an assignment of atom texts; unknown atoms are
    /// false.
    pub fn eval(&self, val: &HashMap<String, bool>) -> bool {
        self.eval_in(&self.formula, &mut Vec::new(), val)
    }

    fn eval_in(&self, f: &RF, env: &mut Env, val: &HashMap<String, bool>) -> bool {
        match f {
            RF::Top => true,
            RF::Bot => false,
            RF::Atom(..) => val.get(&self.atom_text(f, env)).copied().unwrap_or(false),
            RF::Not(x) => !self.eval_in(x, env, val),
            RF::And(a, b) => self.eval_in(a, env, val) & self.eval_in(b, env, val),
            RF::Or(a, b) => self.eval_in(a, env, val) | self.eval_in(b, env, val),
            RF::Impl(a, b) => !self.eval_in(a, env, val) | self.eval_in(b, env, val),
            RF::Iff(a, b) => self.eval_in(a, env, val) == self.eval_in(b, env, val),
            RF::Big {
                and,
                binders,
                when,
                body,
            } => {
                let mut vals = self
                    .instances(binders, when, env)
                    .into_iter()
                    .map(|mut e| self.eval_in(body, &mut e, val));
                if *and {
                    vals.all(|x| x)
                } else {
                    vals.any(|x| x)
                }
            }
            RF::Card {
                kind,
                k,
                binders,
                when,
                body,
            } => {
                let n = self
                    .instances(binders, when, env)
                    .into_iter()
                    .filter(|e| self.eval_in(body, &mut e.clone(), val))
                    .count() as i64;
                match kind {
                    CardKind::AtLeast => n >= *k,
                    CardKind::AtMost => n <= *k,
                    CardKind::Exact => n == *k,
                }
            }
        }
    }
}

fn split_and<'a>(f: &'a RF, out: &mut Vec<&'a RF>) {
    match f {
        RF::And(a, b) => {
            split_and(a, out);
            split_and(b, out);
        }
        other => out.push(other),
    }
}

fn render_iexpr(e: &IExpr) -> String {
    match e {
        IExpr::Const(v) => v.text(),
        IExpr::Var(v) => format!("${v}"),
        IExpr::Offset(v, c) if *c < 0 => format!("${v} - {}", -c),
        IExpr::Offset(v, c) => format!("${v} + {c}"),
    }
}

fn render_cond(c: &RCond) -> String {
    match c {
        RCond::Cmp(op, a, b) => format!("{} {} {}", render_iexpr(a), op.input_text(), render_iexpr(b)),
        RCond::Not(x) => format!("not ({})", render_cond(x)),
        RCond::And(a, b) => format!("({} and {})", render_cond(a), render_cond(b)),
        RCond::Or(a, b) => format!("({} or {})", render_cond(a), render_cond(b)),
    }
}

fn eval_iexpr(e: &IExpr, env: &Env) -> Val {
    let lookup = |v: &str| {
        env.iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| panic!("unbound ${v}"))
    };
    match e {
        IExpr::Const(v) => v.clone(),
        IExpr::Var(v) => lookup(v),
        IExpr::Offset(v, c) => match lookup(v) {
            Val::Int(i) => Val::Int(i + c),
            Val::Sym(_) => panic!("offset on a symbol"),
        },
    }
}

fn eval_cond(c: &RCond, env: &Env) -> bool {
    match c {
        RCond::Cmp(op, a, b) => {
            let (a, b) = (eval_iexpr(a, env), eval_iexpr(b, env));
            match (a, b) {
                (Val::Int(x), Val::Int(y)) => match op {
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                },
                (x, y) => match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    _ => panic!("ordering on symbols"),
                },
            }
        }
        RCond::Not(x) => !eval_cond(x, env),
        RCond::And(a, b) => eval_cond(a, env) && eval_cond(b, env),
        RCond::Or(a, b) => eval_cond(a, env) || eval_cond(b, env),
    }
}

/// Shape limits for [`generate`].
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_families: usize,
    pub max_domain: usize,
    pub max_depth: usize,
    /// Regenerate until the atom universe size lies in this range.
    pub min_universe: usize,
    pub max_universe: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_families: 4,
            max_domain: 3,
            max_depth: 4,
            min_universe: 3,
            max_universe: 12,
        }
    }
}

const SYMS: [&str; 3] = ["a", "b", "c"];

/// A random well-scoped program within `lim`.
pub fn generate(rng: &mut impl Rng, lim: Limits) -> RandomProgram {
    loop {
        let p = generate_once(rng, lim);
        if (lim.min_universe..=lim.max_universe).contains(&p.universe().len()) {
            return p;
        }
    }
}

fn generate_once(rng: &mut impl Rng, lim: Limits) -> RandomProgram {
    let n_fam = rng.gen_range(1..=lim.max_families);
    let families: Vec<Family> = (0..n_fam)
        .map(|i| Family {
            name: ["P", "Q", "R", "S"][i % 4].to_string(),
            arity: *[0, 1, 1, 2].choose(rng).unwrap(),
        })
        .collect();
    let mut sets = Vec::new();
    for name in ["A", "B"] {
        if rng.gen_bool(0.6) {
            let size = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=lim.max_domain) };
            let vals = if rng.gen_bool(0.7) {
                (1..=size as i64).map(Val::Int).collect()
            } else {
                let mut s: Vec<&str> = SYMS.to_vec();
                s.shuffle(rng);
                s[..size].iter().map(|x| Val::Sym(x.to_string())).collect()
            };
            sets.push((name.to_string(), vals));
        }
    }
    let mut g = Gen {
        rng,
        lim,
        sets: &sets,
        families: &families,
        scope: Vec::new(),
        fresh: 0,
    };
    let formula = g.formula(lim.max_depth);
    let header = g.rng.gen_bool(0.5);
    RandomProgram {
        sets,
        families,
        formula,
        header,
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    lim: Limits,
    sets: &'a [(String, Vec<Val>)],
    families: &'a [Family],
    /// Binder names in scope and whether they range over integers.
    scope: Vec<(String, bool)>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn formula(&mut self, depth: usize) -> RF {
        let at_top = depth == self.lim.max_depth;
        if depth == 0 || (!at_top && self.rng.gen_bool(0.15)) {
            return match self.rng.gen_range(0..16) {
                0 => RF::Top,
                1 => RF::Bot,
                _ => self.atom(),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => RF::Not(Box::new(self.formula(d))),
            1 => RF::And(Box::new(self.formula(d)), Box::new(self.formula(d))),
            2 => RF::Or(Box::new(self.formula(d)), Box::new(self.formula(d))),
            3 => RF::Impl(Box::new(self.formula(d)), Box::new(self.formula(d))),
            4 => RF::Iff(Box::new(self.formula(d)), Box::new(self.formula(d))),
            5..=7 => {
                let mark = self.scope.len();
                let (binders, when) = self.binders();
                let body = Box::new(self.formula(d));
                self.scope.truncate(mark);
                RF::Big {
                    and: self.rng.gen_bool(0.5),
                    binders,
                    when,
                    body,
                }
            }
            _ => {
                let mark = self.scope.len();
                let (binders, when) = self.binders();
                let body = Box::new(self.formula(d));
                self.scope.truncate(mark);
                let kind = [CardKind::AtLeast, CardKind::AtMost, CardKind::Exact][self.rng.gen_range(0..3)];
                RF::Card {
                    kind,
                    k: self.rng.gen_range(-1..=3),
                    binders,
                    when,
                    body,
                }
            }
        }
    }

    fn binders(&mut self) -> (Vec<Binder>, Option<RCond>) {
        let n = self.rng.gen_range(1..=2);
        let mut out = Vec::new();
        for _ in 0..n {
            let var = format!("v{}", self.fresh);
            self.fresh += 1;
            let ints: Vec<String> = self.scope.iter().filter(|s| s.1).map(|s| s.0.clone()).collect();
            let (set, is_int) = match self.rng.gen_range(0..4) {
                0 if !self.sets.is_empty() => {
                    let i = self.rng.gen_range(0..self.sets.len());
                    let is_int = self.sets[i].1.first().is_none_or(Val::is_int);
                    (SetRef::Named(i), is_int)
                }
                1 if !ints.is_empty() => {
                    let lo = ints.choose(self.rng).unwrap().clone();
                    (SetRef::Range(IExpr::Var(lo), self.lim.max_domain as i64), true)
                }
                2 => {
                    let size = self.rng.gen_range(1..=self.lim.max_domain);
                    let mut s: Vec<&str> = SYMS.to_vec();
                    s.shuffle(self.rng);
                    let vals = s[..size].iter().map(|x| Val::Sym(x.to_string())).collect();
                    (SetRef::Literal(vals), false)
                }
                _ => {
                    let hi = if self.rng.gen_bool(0.1) { 0 } else { self.rng.gen_range(1..=self.lim.max_domain as i64) };
                    (SetRef::Range(IExpr::Const(Val::Int(1)), hi), true)
                }
            };
            self.scope.push((var.clone(), is_int));
            out.push(Binder { var, set });
        }
        let when = if self.rng.gen_bool(0.3) {
            Some(self.cond(2))
        } else {
            None
        };
        (out, when)
    }

    fn cond(&mut self, depth: usize) -> RCond {
        if depth > 0 && self.rng.gen_bool(0.3) {
            let a = Box::new(self.cond(depth - 1));
            return match self.rng.gen_range(0..3) {
                0 => RCond::Not(a),
                1 => RCond::And(a, Box::new(self.cond(depth - 1))),
                _ => RCond::Or(a, Box::new(self.cond(depth - 1))),
            };
        }
        let (var, is_int) = self.scope.choose(self.rng).unwrap().clone();
        if is_int {
            let ops = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];
            let ints: Vec<String> =
                self.scope.iter().filter(|s| s.1 && s.0 != var).map(|s| s.0.clone()).collect();
            let rhs = if !ints.is_empty() && self.rng.gen_bool(0.6) {
                IExpr::Var(ints.choose(self.rng).unwrap().clone())
            } else {
                IExpr::Const(Val::Int(self.rng.gen_range(0..=3)))
            };
            RCond::Cmp(*ops.choose(self.rng).unwrap(), IExpr::Var(var), rhs)
        } else {
            let syms: Vec<String> =
                self.scope.iter().filter(|s| !s.1 && s.0 != var).map(|s| s.0.clone()).collect();
            let rhs = if !syms.is_empty() && self.rng.gen_bool(0.6) {
                IExpr::Var(syms.choose(self.rng).unwrap().clone())
            } else {
                IExpr::Const(Val::Sym(SYMS.choose(self.rng).unwrap().to_string()))
            };
            let op = if self.rng.gen_bool(0.5) { CmpOp::Eq } else { CmpOp::Ne };
            RCond::Cmp(op, IExpr::Var(var), rhs)
        }
    }

    fn atom(&mut self) -> RF {
        let fam = self.rng.gen_range(0..self.families.len());
        let arity = self.families[fam].arity;
        let idx = (0..arity)
            .map(|_| {
                if !self.scope.is_empty() && self.rng.gen_bool(0.75) {
                    let (v, is_int) = self.scope.choose(self.rng).unwrap().clone();
                    if is_int && self.rng.gen_bool(0.2) {
                        IExpr::Offset(v, if self.rng.gen_bool(0.5) { 1 } else { -1 })
                    } else {
                        IExpr::Var(v)
                    }
                } else if self.rng.gen_bool(0.7) {
                    IExpr::Const(Val::Int(self.rng.gen_range(1..=3)))
                } else {
                    IExpr::Const(Val::Sym(SYMS.choose(self.rng).unwrap().to_string()))
                }
            })
            .collect();
        RF::Atom(fam, idx)
    }
}
