//! Source-to-backend driver shared by the command line and the service.

use std::time::Duration;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::ast::Program;
use crate::card::CardEncoding;
use crate::cnf::{tseitin, ClauseDb, VarMap};
use crate::diag::Diagnostic;
use crate::ground::{ground, GroundFormula};
use crate::modelview::{FilterError, ModelView, NameMatcher, Polarity};
use crate::parser::{normalize_newlines, parse_with_warnings};
use crate::render::render_program_latex;
use crate::sat::{ExternalSatSession, ExternalSolver, NextModel, SatError, Session, SolverConfig};
use crate::smt::{self, SmtError, SmtNext, SmtScript, SmtSession, SmtSolver};
use crate::Span;

/// A parsed and grounded program.
#[derive(Debug, Clone)]
pub struct Compiled {
    /// Newline-normalized source; diagnostic spans refer to this text.
    pub source: String,
    pub program: Program,
    pub warnings: Vec<Diagnostic>,
    pub formula: GroundFormula,
}

#[derive(Debug, Clone)]
pub enum Backend {
    Sat(ClauseDb),
    Smt(SmtScript),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Distinct propositional atoms plus theory variables.
    pub n_atoms: usize,
    /// DIMACS clauses; zero for SMT programs.
    pub n_clauses: usize,
    /// DIMACS variables, or declared SMT constants.
    pub n_vars: usize,
}

/// Parses and grounds `src`. On failure every diagnostic is an error.
pub fn compile(src: &str) -> Result<Compiled, Vec<Diagnostic>> {
    let source = normalize_newlines(src).into_owned();
    let (program, warnings) = parse_with_warnings(&source)?;
    let formula = ground(&program).map_err(|e| vec![e.to_diagnostic()])?;
    Ok(Compiled {
        source,
        program,
        warnings,
        formula,
    })
}

impl Compiled {
    pub fn latex(&self) -> String {
        render_program_latex(&self.program)
    }

    pub fn has_theory(&self) -> bool {
        self.formula.has_theory()
    }

    /// CNF for propositional programs, an SMT-LIB script otherwise.
    pub fn backend(&self, enc: CardEncoding) -> Result<Backend, Diagnostic> {
        if self.has_theory() {
            smt::emit(&self.formula, enc, false)
                .map(Backend::Smt)
                .map_err(|e| Diagnostic::error(e.to_string(), self.whole()))
        } else {
            tseitin(&self.formula, enc)
                .map(Backend::Sat)
                .map_err(|e| Diagnostic::error(e.to_string(), self.whole()))
        }
    }

    fn whole(&self) -> Span {
        Span::new(0, self.source.len())
    }
}

impl Backend {
    pub fn stats(&self) -> Stats {
        match self {
            Backend::Sat(db) => Stats {
                n_atoms: db.n_user(),
                n_clauses: db.clauses.len(),
                n_vars: db.n_vars(),
            },
            Backend::Smt(s) => {
                let n = s.bool_atoms.len() + s.theory_vars.len();
                Stats {
                    n_atoms: n,
                    n_clauses: 0,
                    n_vars: n,
                }
            }
        }
    }
}

/// Solver selection and limits for [`Enumerator`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub encoding: CardEncoding,
    pub seed: u64,
    pub conflict_budget: u64,
    /// Command template of an external SAT solver; the embedded solver
    /// is used when absent.
    pub sat_cmd: Option<String>,
    /// Command template of the SMT solver; see [`SmtSolver::resolve`].
    pub smt_cmd: Option<String>,
    pub timeout: Duration,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let cfg = SolverConfig::default();
        SolveOptions {
            encoding: CardEncoding::Auto,
            seed: cfg.seed,
            conflict_budget: cfg.conflict_budget,
            sat_cmd: None,
            smt_cmd: None,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("{0}")]
    Internal(String),
    /// The external solver could not be run or gave unusable output.
    #[error("{0}")]
    Solver(String),
}

impl From<SatError> for SolveError {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Internal(m) => SolveError::Internal(m),
            SatError::External(m) => SolveError::Solver(format!("external solver: {m}")),
        }
    }
}

impl From<SmtError> for SolveError {
    fn from(e: SmtError) -> Self {
        SolveError::Solver(e.to_string())
    }
}

/// A numeric theory value, rendered as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumValue {
    pub name: String,
    pub value: String,
}

/// One displayed model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Found {
    pub rows: ModelView,
    /// Theory variables, in declaration order; empty for SAT programs.
    pub values: Vec<NumValue>,
}

impl Found {
    /// Applies the row filter. Numeric values have no polarity, so they are
    /// kept only under [`Polarity::All`] and when their name matches.
    pub fn filtered(&self, pattern: &str, polarity: Polarity) -> Result<Found, FilterError> {
        let rows = self.rows.apply_filter(pattern, polarity)?;
        let m = NameMatcher::new(pattern)?;
        let values = self
            .values
            .iter()
            .filter(|v| polarity == Polarity::All && m.matches(&v.name))
            .cloned()
            .collect();
        Ok(Found { rows, values })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Model(Found),
    Exhausted,
    Unknown,
}

/// Yields projected models one at a time, whichever back end applies.
pub enum Enumerator {
    Embedded(Box<Session>, VarMap),
    ExternalSat(ExternalSatSession, VarMap),
    Smt(Box<SmtSession>),
}

impl Enumerator {
    pub fn new(c: &Compiled, backend: Backend, opts: &SolveOptions) -> Self {
        match backend {
            Backend::Sat(db) => match &opts.sat_cmd {
                Some(cmd) => {
                    let mut solver = ExternalSolver::new(cmd.clone());
                    solver.timeout = opts.timeout;
                    let vm = db.varmap.clone();
                    Enumerator::ExternalSat(ExternalSatSession::new(solver, db), vm)
                }
                None => {
                    let cfg = SolverConfig {
                        seed: opts.seed,
                        conflict_budget: opts.conflict_budget,
                        ..SolverConfig::default()
                    };
                    Enumerator::Embedded(Box::new(Session::new(&db, cfg)), db.varmap)
                }
            },
            Backend::Smt(script) => {
                let mut solver = SmtSolver::resolve(opts.smt_cmd.as_deref());
                solver.timeout = opts.timeout;
                Enumerator::Smt(Box::new(SmtSession::new(solver, c.formula.clone(), script)))
            }
        }
    }

    pub fn next_model(&mut self) -> Result<Step, SolveError> {
        let sat_step = |n: NextModel, vm: &VarMap| match n {
            NextModel::Model(m) => Step::Model(Found {
                rows: ModelView::decode(&m, vm),
                values: Vec::new(),
            }),
            NextModel::Exhausted => Step::Exhausted,
            NextModel::Unknown => Step::Unknown,
        };
        Ok(match self {
            Enumerator::Embedded(s, vm) => sat_step(s.next_model()?, vm),
            Enumerator::ExternalSat(s, vm) => sat_step(s.next_model()?, vm),
            Enumerator::Smt(s) => match s.next_model()? {
                SmtNext::Model(m) => {
                    let script = s.script();
                    let rows = ModelView::from_rows(
                        script
                            .bool_atoms
                            .iter()
                            .map(|a| (a.clone(), m.bools.get(a).copied().unwrap_or(false))),
                    );
                    let values = script
                        .theory_vars
                        .iter()
                        .map(|v| NumValue {
                            name: v.name.clone(),
                            value: m.nums.get(&v.name).cloned().unwrap_or_else(BigRational::zero).to_string(),
                        })
                        .collect();
                    Step::Model(Found { rows, values })
                }
                SmtNext::Exhausted => Step::Exhausted,
                SmtNext::Unknown => Step::Unknown,
            },
        })
    }
}
