//! Embedded CDCL solver and projected model enumeration.

mod external;
mod heap;
mod solver;

use thiserror::Error;

use crate::cnf::ClauseDb;

pub use external::{ExternalSatSession, ExternalSolver};
pub use solver::{luby, Solver, SolverConfig, Stats};

/// Total assignment; `values[v - 1]` is the value of DIMACS variable `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub values: Vec<bool>,
}

impl Model {
    /// Truth value of a DIMACS literal.
    pub fn lit(&self, l: i32) -> bool {
        self.values[l.unsigned_abs() as usize - 1] == (l > 0)
    }

    /// Clause forbidding this model's values on variables `1..=n`.
    pub fn blocking_clause(&self, n: usize) -> Vec<i32> {
        (1..=n as i32)
            .map(|v| if self.lit(v) { -v } else { v })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    /// Conflict budget exhausted, or an external solver gave no answer.
    Unknown,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("internal error: {0}")]
    Internal(String),
    #[error("external solver: {0}")]
    External(String),
}

/// Loads a clause database into a fresh solver.
pub fn solver_for(db: &ClauseDb, cfg: SolverConfig) -> Solver {
    let mut s = Solver::new(db.n_vars(), cfg);
    for c in &db.clauses {
        s.add_clause(c);
    }
    s
}

pub fn solve(db: &ClauseDb, assumptions: &[i32]) -> Result<SolveOutcome, SatError> {
    solver_for(db, SolverConfig::default()).solve(assumptions)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextModel {
    Model(Model),
    /// No further model differs on the user atoms.
    Exhausted,
    Unknown,
}

/// Enumerates models that are pairwise distinct on the user atoms
/// `1..=n_user`; generated variables never cause a repeat.
#[derive(Debug, Clone)]
pub struct Session {
    solver: Solver,
    n_user: usize,
    last: Option<Model>,
    exhausted: bool,
    served: usize,
}

impl Session {
    pub fn new(db: &ClauseDb, cfg: SolverConfig) -> Self {
        Session {
            solver: solver_for(db, cfg),
            n_user: db.n_user(),
            last: None,
            exhausted: false,
            served: 0,
        }
    }

    pub fn models_served(&self) -> usize {
        self.served
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn next_model(&mut self) -> Result<NextModel, SatError> {
        if self.exhausted {
            return Ok(NextModel::Exhausted);
        }
        if let Some(m) = self.last.take() {
            let block = m.blocking_clause(self.n_user);
            if block.is_empty() || !self.solver.add_clause(&block) {
                self.exhausted = true;
                return Ok(NextModel::Exhausted);
            }
        }
        match self.solver.solve(&[])? {
            SolveOutcome::Sat(m) => {
                self.last = Some(m.clone());
                self.served += 1;
                Ok(NextModel::Model(m))
            }
            SolveOutcome::Unsat => {
                self.exhausted = true;
                Ok(NextModel::Exhausted)
            }
            SolveOutcome::Unknown => Ok(NextModel::Unknown),
        }
    }
}

/// Number of projected models, capped at `limit`. `None` when the solver
/// gave up before the count was settled.
pub fn count_models(db: &ClauseDb, limit: usize, cfg: SolverConfig) -> Result<Option<usize>, SatError> {
    let mut s = Session::new(db, cfg);
    let mut n = 0;
    while n < limit {
        match s.next_model()? {
            NextModel::Model(_) => n += 1,
            NextModel::Exhausted => break,
            NextModel::Unknown => return Ok(None),
        }
    }
    Ok(Some(n))
}
