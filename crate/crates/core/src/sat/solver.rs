//! Conflict-driven clause learning over DIMACS-numbered variables.
//!
//! Two watched literals with blockers, first-UIP learning with local
//! minimization, VSIDS with phase saving, Luby restarts and periodic
//! removal of inactive learned clauses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heap::VarHeap;
use super::{Model, SatError, SolveOutcome};

/// Internal literal: `2 * var + sign`, var 0-based, sign 1 = negative.
type Lit = u32;

fn lit_of(dimacs: i32) -> Lit {
    let v = dimacs.unsigned_abs() - 1;
    2 * v + (dimacs < 0) as u32
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub seed: u64,
    /// Conflicts allowed per `solve` call before giving up with `Unknown`.
    pub conflict_budget: u64,
    pub restart_base: u64,
    pub var_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            conflict_budget: 10_000_000,
            restart_base: 64,
            var_decay: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    n_vars: usize,
    clauses: Vec<ClauseData>,
    /// Every clause as given, for the model verifier.
    original: Vec<Vec<i32>>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<Val>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    n_learnts: usize,
    max_learnts: f64,
    ok: bool,
    pub stats: Stats,
}

impl Solver {
    pub fn new(n_vars: usize, cfg: SolverConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        // Tiny random initial activities make the branching order depend
        // on the seed only.
        let activity: Vec<f64> = (0..n_vars).map(|_| rng.gen::<f64>() * 1e-5).collect();
        let mut heap = VarHeap::with_vars(n_vars);
        for v in 0..n_vars {
            heap.insert(v as u32, &activity);
        }
        Solver {
            cfg,
            n_vars,
            clauses: Vec::new(),
            original: Vec::new(),
            watches: vec![Vec::new(); 2 * n_vars],
            assigns: vec![Val::Undef; n_vars],
            level: vec![0; n_vars],
            reason: vec![None; n_vars],
            trail: Vec::with_capacity(n_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            phase: vec![false; n_vars],
            seen: vec![false; n_vars],
            n_learnts: 0,
            max_learnts: 0.0,
            ok: true,
            stats: Stats::default(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn value(&self, l: Lit) -> Val {
        match self.assigns[var(l)] {
            Val::Undef => Val::Undef,
            v => {
                let positive = v == Val::True;
                if positive == (l & 1 == 0) {
                    Val::True
                } else {
                    Val::False
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause of DIMACS literals. Must be called between solves.
    /// Returns false once the formula is known unsatisfiable.
    pub fn add_clause(&mut self, clause: &[i32]) -> bool {
        assert!(
            clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.n_vars),
            "literal out of range in {clause:?}"
        );
        self.original.push(clause.to_vec());
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut lits: Vec<Lit> = Vec::with_capacity(clause.len());
        for &d in clause {
            let l = lit_of(d);
            match self.value(l) {
                Val::True => return true,
                Val::False => continue,
                Val::Undef => {
                    if lits.contains(&neg(l)) {
                        return true;
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                    }
                }
            }
        }
        match lits.len() {
            0 => {
                self.ok = false;
            }
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(lits, false);
            }
        }
        self.ok
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[neg(lits[0]) as usize].push(Watch {
            cref,
            blocker: lits[1],
        });
        self.watches[neg(lits[1]) as usize].push(Watch {
            cref,
            blocker: lits[0],
        });
        if learnt {
            self.n_learnts += 1;
        }
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = var(l);
        debug_assert_eq!(self.assigns[v], Val::Undef);
        self.assigns[v] = if l & 1 == 0 { Val::True } else { Val::False };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let (mut i, mut j) = (0, 0);
            'watches: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == Val::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == Val::True {
                    ws[j] = Watch {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != Val::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[neg(l) as usize].push(Watch {
                            cref: w.cref,
                            blocker: first,
                        });
                        continue 'watches;
                    }
                }
                ws[j] = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == Val::False {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut to_clear: Vec<usize> = Vec::new();
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let cur = self.decision_level();
        loop {
            self.bump_clause(confl as usize);
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    to_clear.push(v);
                    self.bump_var(v);
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var(self.trail[index])] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[var(pl)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[var(pl)].expect("implied literal has a reason");
        }
        learnt[0] = neg(p.unwrap());

        // Drop literals implied by the rest of the clause.
        let mut kept = 1;
        for i in 1..learnt.len() {
            let q = learnt[i];
            let redundant = match self.reason[var(q)] {
                None => false,
                Some(r) => self.clauses[r as usize].lits[1..]
                    .iter()
                    .all(|&x| self.seen[var(x)] || self.level[var(x)] == 0),
            };
            if !redundant {
                learnt[kept] = q;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for v in to_clear {
            self.seen[v] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[var(learnt[i])] > self.level[var(learnt[best])] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            self.level[var(learnt[1])]
        };
        (learnt, bt)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.assigns[v] = Val::Undef;
            self.reason[v] = None;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == Val::Undef {
                let positive = self.phase[v as usize];
                return Some(2 * v + (!positive) as u32);
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let l0 = self.clauses[cref].lits[0];
        self.value(l0) == Val::True && self.reason[var(l0)] == Some(cref as u32)
    }

    /// Deletes the less active half of the learned clauses.
    fn reduce_learnts(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(i)
            })
            .collect();
        cands.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .total_cmp(&self.clauses[b].activity)
        });
        for &i in &cands[..cands.len() / 2] {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
            self.n_learnts -= 1;
        }
    }

    /// Solves under `assumptions` (DIMACS literals).
    pub fn solve(&mut self, assumptions: &[i32]) -> Result<SolveOutcome, SatError> {
        if !self.ok {
            return Ok(SolveOutcome::Unsat);
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&d| lit_of(d)).collect();
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let mut conflicts_here = 0u64;
        let mut restart_idx = 0u32;
        let result = 'search: loop {
            let limit = luby(restart_idx) * self.cfg.restart_base;
            restart_idx += 1;
            let mut since_restart = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    since_restart += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        break 'search SolveOutcome::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let first = learnt[0];
                        let cref = self.attach(learnt, true);
                        self.bump_clause(cref as usize);
                        self.enqueue(first, Some(cref));
                    }
                    self.var_inc /= self.cfg.var_decay;
                    self.cla_inc /= 0.999;
                    if conflicts_here >= self.cfg.conflict_budget {
                        break 'search SolveOutcome::Unknown;
                    }
                } else {
                    if since_restart >= limit {
                        self.stats.restarts += 1;
                        self.cancel_until(0);
                        break;
                    }
                    if self.n_learnts as f64 - self.trail.len() as f64 >= self.max_learnts {
                        self.reduce_learnts();
                        self.max_learnts *= 1.1;
                    }
                    // Assumptions occupy the first decision levels.
                    let mut next = None;
                    while (self.decision_level() as usize) < assumptions.len() {
                        let a = assumptions[self.decision_level() as usize];
                        match self.value(a) {
                            Val::True => self.trail_lim.push(self.trail.len()),
                            Val::False => break 'search SolveOutcome::Unsat,
                            Val::Undef => {
                                next = Some(a);
                                break;
                            }
                        }
                    }
                    let decision = match next {
                        Some(a) => a,
                        None => match self.pick_branch() {
                            Some(l) => l,
                            None => break 'search SolveOutcome::Sat(self.current_model()),
                        },
                    };
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(decision, None);
                }
            }
        };
        self.cancel_until(0);
        if let SolveOutcome::Sat(m) = &result {
            self.verify(m)?;
        }
        Ok(result)
    }

    fn current_model(&self) -> Model {
        Model {
            values: self.assigns.iter().map(|&v| v == Val::True).collect(),
        }
    }

    /// Re-checks every clause ever added against `m`.
    fn verify(&self, m: &Model) -> Result<(), SatError> {
        for c in &self.original {
            if !c.iter().any(|&l| m.lit(l)) {
                return Err(SatError::Internal(format!(
                    "solver returned an assignment violating clause {c:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based index).
pub fn luby(i: u32) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(n: usize, clauses: &[&[i32]]) -> SolveOutcome {
        let mut s = Solver::new(n, SolverConfig::default());
        for c in clauses {
            s.add_clause(c);
        }
        s.solve(&[]).unwrap()
    }

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn contradiction() {
        assert_eq!(solve(1, &[&[1], &[-1]]), SolveOutcome::Unsat);
    }

    #[test]
    fn simple_sat() {
        let SolveOutcome::Sat(m) = solve(2, &[&[1, 2]]) else {
            panic!()
        };
        assert!(m.lit(1) || m.lit(2));
    }

    #[test]
    fn empty_clause_is_unsat() {
        assert_eq!(solve(1, &[&[]]), SolveOutcome::Unsat);
    }

    #[test]
    fn assumptions() {
        let mut s = Solver::new(2, SolverConfig::default());
        s.add_clause(&[1, 2]);
        assert_eq!(s.solve(&[-1, -2]).unwrap(), SolveOutcome::Unsat);
        let SolveOutcome::Sat(m) = s.solve(&[-1]).unwrap() else {
            panic!()
        };
        assert!(m.lit(2));
    }

    #[test]
    fn budget_gives_unknown() {
        // PHP(6,5) needs far more than one conflict.
        let mut s = Solver::new(
            30,
            SolverConfig {
                conflict_budget: 1,
                ..SolverConfig::default()
            },
        );
        let v = |p: i32, h: i32| p * 5 + h + 1;
        for p in 0..6 {
            s.add_clause(&(0..5).map(|h| v(p, h)).collect::<Vec<_>>());
        }
        for h in 0..5 {
            for p in 0..6 {
                for q in p + 1..6 {
                    s.add_clause(&[-v(p, h), -v(q, h)]);
                }
            }
        }
        assert_eq!(s.solve(&[]).unwrap(), SolveOutcome::Unknown);
    }
}
