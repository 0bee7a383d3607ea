//! Running an external SMT solver and reading its answer.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::sexpr::{parse_all, unquote, SExpr};
use super::{check_model, smt_symbol, SmtError, SmtScript};
use crate::ground::GroundFormula;
use crate::process::{run_shell, shell_quote};

/// Environment variable naming the solver command.
pub const SMT_CMD_ENV: &str = "TWISTC_SMT_CMD";

/// Values assigned by a solver, keyed by unquoted symbol name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SmtModel {
    pub bools: BTreeMap<String, bool>,
    pub nums: BTreeMap<String, BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmtOutcome {
    Sat(SmtModel),
    Unsat,
    Unknown,
}

/// A command template run with `sh -c`; `{file}` is replaced by a
/// temporary `.smt2` path, otherwise the script goes to stdin.
#[derive(Debug, Clone)]
pub struct SmtSolver {
    pub template: String,
    pub timeout: Duration,
}

impl SmtSolver {
    pub fn new(template: impl Into<String>) -> Self {
        SmtSolver {
            template: template.into(),
            timeout: Duration::from_secs(30),
        }
    }

    /// `explicit`, else `$TWISTC_SMT_CMD`, else `z3 -in`.
    pub fn resolve(explicit: Option<&str>) -> Self {
        let cmd = explicit
            .map(str::to_string)
            .or_else(|| std::env::var(SMT_CMD_ENV).ok().filter(|s| !s.trim().is_empty()))
            .unwrap_or_else(|| "z3 -in".to_string());
        SmtSolver::new(cmd)
    }

    pub fn run(&self, script: &str) -> Result<SmtOutcome, SmtError> {
        let io_err = |e: std::io::Error| SmtError::Solver(format!("cannot run '{}': {e}", self.template));
        let out = if self.template.contains("{file}") {
            let mut f = tempfile::Builder::new()
                .suffix(".smt2")
                .tempfile()
                .map_err(io_err)?;
            f.write_all(script.as_bytes()).map_err(io_err)?;
            f.flush().map_err(io_err)?;
            let path = f.path().to_string_lossy().into_owned();
            run_shell(&self.template.replace("{file}", &shell_quote(&path)), None, self.timeout)
                .map_err(io_err)?
        } else {
            run_shell(&self.template, Some(script.to_string()), self.timeout).map_err(io_err)?
        };
        if out.timed_out {
            return Ok(SmtOutcome::Unknown);
        }
        if out.exit_code == Some(127) {
            return Err(SmtError::Solver(format!(
                "command not found: '{}' ({})",
                self.template,
                out.stderr.trim()
            )));
        }
        parse_solver_output(&out.stdout)
    }
}

/// Reads `sat`/`unsat`/`unknown` followed by an optional model of
/// `define-fun` entries.
pub fn parse_solver_output(out: &str) -> Result<SmtOutcome, SmtError> {
    let bad = |m: String| SmtError::Solver(m);
    let forms = parse_all(out).map_err(|e| bad(format!("unreadable output: {e}")))?;
    // After unsat, `(get-model)` itself reports an error; ignore it.
    match forms.first().and_then(SExpr::atom) {
        Some("unsat") => return Ok(SmtOutcome::Unsat),
        Some("unknown" | "timeout") => return Ok(SmtOutcome::Unknown),
        _ => {}
    }
    for f in &forms {
        if let Some([SExpr::Atom(h), SExpr::Str(msg), ..]) = f.list() {
            if h == "error" {
                return Err(bad(msg.clone()));
            }
        }
    }
    let mut it = forms.iter();
    let status = it.next().and_then(SExpr::atom).ok_or_else(|| bad("no status in output".into()))?;
    match status {
        "sat" => {}
        other => return Err(bad(format!("unrecognized status '{other}'"))),
    }
    let mut model = SmtModel::default();
    let Some(entries) = it.next().and_then(SExpr::list) else {
        return Ok(SmtOutcome::Sat(model));
    };
    let entries = match entries.first().and_then(SExpr::atom) {
        Some("model") => &entries[1..],
        _ => entries,
    };
    for e in entries {
        let Some([SExpr::Atom(kw), SExpr::Atom(name), SExpr::List(args), SExpr::Atom(sort), value]) = e.list()
        else {
            return Err(bad(format!("unexpected model entry {e}")));
        };
        if kw != "define-fun" || !args.is_empty() {
            continue;
        }
        let name = unquote(name).to_string();
        match sort.as_str() {
            "Bool" => {
                let v = match value.atom() {
                    Some("true") => true,
                    Some("false") => false,
                    _ => return Err(bad(format!("unexpected Bool value {value}"))),
                };
                model.bools.insert(name, v);
            }
            "Int" | "Real" => {
                let v = numeral(value).ok_or_else(|| bad(format!("unexpected numeric value {value}")))?;
                model.nums.insert(name, v);
            }
            _ => {}
        }
    }
    Ok(SmtOutcome::Sat(model))
}

fn numeral(e: &SExpr) -> Option<BigRational> {
    match e {
        SExpr::Atom(a) => {
            let (int, frac) = a.split_once('.').unwrap_or((a, ""));
            let digits: BigInt = format!("{int}{frac}").parse().ok()?;
            Some(BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len())))
        }
        SExpr::List(xs) => match xs.as_slice() {
            [SExpr::Atom(op), x] if op == "-" => Some(-numeral(x)?),
            [SExpr::Atom(op), a, b] if op == "/" => {
                let d = numeral(b)?;
                if d == BigRational::from_integer(0.into()) {
                    return None;
                }
                Some(numeral(a)? / d)
            }
            _ => None,
        },
        SExpr::Str(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmtNext {
    Model(SmtModel),
    Exhausted,
    Unknown,
}

/// Enumerates models distinct on the propositional atoms by re-running the
/// solver with blocking assertions. Every model is re-checked against the
/// ground formula.
#[derive(Debug, Clone)]
pub struct SmtSession {
    solver: SmtSolver,
    formula: GroundFormula,
    script: SmtScript,
    blocks: Vec<String>,
    exhausted: bool,
}

impl SmtSession {
    pub fn new(solver: SmtSolver, formula: GroundFormula, script: SmtScript) -> Self {
        SmtSession {
            solver,
            formula,
            script,
            blocks: Vec::new(),
            exhausted: false,
        }
    }

    pub fn script(&self) -> &SmtScript {
        &self.script
    }

    pub fn next_model(&mut self) -> Result<SmtNext, SmtError> {
        if self.exhausted {
            return Ok(SmtNext::Exhausted);
        }
        let mut text = self.script.body.clone();
        for b in &self.blocks {
            text.push_str(b);
        }
        text.push_str("(check-sat)\n(get-model)\n");
        match self.solver.run(&text)? {
            SmtOutcome::Sat(m) => {
                if !check_model(&self.formula, &m)? {
                    return Err(SmtError::Solver("reported model does not satisfy the formula".into()));
                }
                if self.script.bool_atoms.is_empty() {
                    self.exhausted = true;
                } else {
                    let lits: Vec<String> = self
                        .script
                        .bool_atoms
                        .iter()
                        .map(|a| {
                            let s = smt_symbol(a);
                            if m.bools.get(a).copied().unwrap_or(false) {
                                format!("(not {s})")
                            } else {
                                s
                            }
                        })
                        .collect();
                    self.blocks.push(format!("(assert (or {}))\n", lits.join(" ")));
                }
                Ok(SmtNext::Model(m))
            }
            SmtOutcome::Unsat => {
                self.exhausted = true;
                Ok(SmtNext::Exhausted)
            }
            SmtOutcome::Unknown => Ok(SmtNext::Unknown),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_z3_style_model() {
        let out = "sat\n(\n  (define-fun tau_a () Real\n    (/ 1.0 2.0))\n  (define-fun |P(1)| () Bool\n    true)\n  (define-fun x () Int\n    (- 3))\n)\n";
        let SmtOutcome::Sat(m) = parse_solver_output(out).unwrap() else {
            panic!()
        };
        assert!(m.bools["P(1)"]);
        assert_eq!(m.nums["tau_a"], BigRational::new(1.into(), 2.into()));
        assert_eq!(m.nums["x"], BigRational::from_integer((-3).into()));
    }

    #[test]
    fn statuses_and_errors() {
        assert_eq!(parse_solver_output("unsat\n").unwrap(), SmtOutcome::Unsat);
        let after = "unsat\n(error \"line 8 column 10: model is not available\")";
        assert_eq!(parse_solver_output(after).unwrap(), SmtOutcome::Unsat);
        assert_eq!(parse_solver_output("unknown\n").unwrap(), SmtOutcome::Unknown);
        assert!(parse_solver_output("(error \"line 3: unknown constant\")").is_err());
        assert!(parse_solver_output("").is_err());
        let old = "sat\n(model (define-fun p () Bool false))";
        let SmtOutcome::Sat(m) = parse_solver_output(old).unwrap() else {
            panic!()
        };
        assert!(!m.bools["p"]);
    }

    #[test]
    fn missing_command() {
        let s = SmtSolver::new("definitely-not-a-solver-xyz");
        assert!(matches!(s.run("(check-sat)"), Err(SmtError::Solver(_))));
    }
}
