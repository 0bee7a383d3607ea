//! Adapter for SAT-competition style solvers run as subprocesses.

use std::io::Write;
use std::time::Duration;

use super::{Model, NextModel, SatError, SolveOutcome};
use crate::cnf::{emit_dimacs_with, ClauseDb};
use crate::process::{run_shell, shell_quote};

/// A command template run with `sh -c`. `{file}` is replaced by the path
/// of a temporary DIMACS file; without it the DIMACS text goes to stdin.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub template: String,
    pub timeout: Duration,
}

impl ExternalSolver {
    pub fn new(template: impl Into<String>) -> Self {
        ExternalSolver {
            template: template.into(),
            timeout: Duration::from_secs(30),
        }
    }

    pub fn solve(&self, db: &ClauseDb, extra: &[Vec<i32>]) -> Result<SolveOutcome, SatError> {
        let text = emit_dimacs_with(db, extra, false);
        let io_err = |e: std::io::Error| SatError::External(format!("cannot run solver: {e}"));
        let out = if self.template.contains("{file}") {
            let mut f = tempfile::Builder::new()
                .suffix(".cnf")
                .tempfile()
                .map_err(io_err)?;
            f.write_all(text.as_bytes()).map_err(io_err)?;
            f.flush().map_err(io_err)?;
            let path = f.path().to_string_lossy().into_owned();
            let cmd = self.template.replace("{file}", &shell_quote(&path));
            run_shell(&cmd, None, self.timeout).map_err(io_err)?
        } else {
            run_shell(&self.template, Some(text), self.timeout).map_err(io_err)?
        };
        if out.timed_out {
            return Ok(SolveOutcome::Unknown);
        }
        let outcome = parse_competition_output(&out.stdout, db.n_vars())?;
        if let SolveOutcome::Sat(m) = &outcome {
            for c in db.clauses.iter().chain(extra) {
                if !c.iter().any(|&l| m.lit(l)) {
                    return Err(SatError::External(format!(
                        "reported model violates clause {c:?}"
                    )));
                }
            }
        }
        Ok(outcome)
    }
}

/// Reads `s SATISFIABLE|UNSATISFIABLE|UNKNOWN` and `v` lines. Variables
/// missing from the `v` lines are false.
pub fn parse_competition_output(out: &str, n_vars: usize) -> Result<SolveOutcome, SatError> {
    let mut status = None;
    let mut values = vec![false; n_vars];
    for line in out.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                let l: i64 = tok
                    .parse()
                    .map_err(|_| SatError::External(format!("bad literal '{tok}' in output")))?;
                if l == 0 {
                    continue;
                }
                let idx = l.unsigned_abs() as usize;
                if idx > n_vars {
                    return Err(SatError::External(format!(
                        "literal {l} out of range (only {n_vars} variables)"
                    )));
                }
                values[idx - 1] = l > 0;
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(SolveOutcome::Sat(Model { values })),
        Some("UNSATISFIABLE") => Ok(SolveOutcome::Unsat),
        Some("UNKNOWN") => Ok(SolveOutcome::Unknown),
        Some(other) => Err(SatError::External(format!("unrecognized status '{other}'"))),
        None => Err(SatError::External("no 's' status line in solver output".into())),
    }
}

/// Enumeration by re-running the solver with blocking clauses appended.
#[derive(Debug, Clone)]
pub struct ExternalSatSession {
    solver: ExternalSolver,
    db: ClauseDb,
    blocks: Vec<Vec<i32>>,
    exhausted: bool,
}

impl ExternalSatSession {
    pub fn new(solver: ExternalSolver, db: ClauseDb) -> Self {
        ExternalSatSession {
            solver,
            db,
            blocks: Vec::new(),
            exhausted: false,
        }
    }

    pub fn next_model(&mut self) -> Result<NextModel, SatError> {
        if self.exhausted {
            return Ok(NextModel::Exhausted);
        }
        match self.solver.solve(&self.db, &self.blocks)? {
            SolveOutcome::Sat(m) => {
                let block = m.blocking_clause(self.db.n_user());
                if block.is_empty() {
                    self.exhausted = true;
                } else {
                    self.blocks.push(block);
                }
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
