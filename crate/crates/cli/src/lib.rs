//! `twistc`: check, render, compile and solve programs from the command line.
//!
//! Exit codes: 0 satisfiable or success, 20 unsatisfiable, 30 unknown,
//! 1 usage or program error, 2 I/O or external solver failure, 99 internal
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use twist_core::card::CardEncoding;
use twist_core::cnf::emit_dimacs;
use twist_core::modelview::Polarity;
use twist_core::pipeline::{compile, Backend, Compiled, Enumerator, Found, SolveError, SolveOptions, Step};
use twist_core::smt;
use twist_core::Diagnostic;

pub mod exit {
    pub const OK: i32 = 0;
    pub const UNSAT: i32 = 20;
    pub const UNKNOWN: i32 = 30;
    pub const USER: i32 = 1;
    pub const IO: i32 = 2;
    pub const INTERNAL: i32 = 99;
}

#[derive(Debug, Parser)]
#[command(name = "twistc", version, about = "Compile and solve indexed propositional programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse and ground; report diagnostics.
    Check(Input),
    /// Print the LaTeX rendering.
    Latex(Input),
    /// Print DIMACS CNF.
    Dimacs {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enc: Encoding,
        /// Omit the `c` lines naming variables.
        #[arg(long)]
        no_comments: bool,
    },
    /// Print an SMT-LIB 2 script.
    Smt2 {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enc: Encoding,
        /// Emit QF_UF even for a program without arithmetic.
        #[arg(long)]
        force: bool,
    },
    /// Print models.
    Solve {
        #[command(flatten)]
        input: Input,
        /// Maximum number of models to print.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        /// Show only atoms containing a match of this regular expression.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, conflicts_with = "false_only")]
        true_only: bool,
        #[arg(long)]
        false_only: bool,
        /// Output JSON (see docs/solve.schema.json).
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the number of models, capped at --limit.
    Count {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Source file, or `-` for stdin.
    file: PathBuf,
}

#[derive(Debug, Args)]
struct Encoding {
    /// Cardinality encoding: auto, binomial or seqcounter.
    #[arg(long, default_value = "auto", value_parser = parse_encoding)]
    encoding: CardEncoding,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[command(flatten)]
    enc: Encoding,
    /// Seed for the embedded solver's branching.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// External SAT solver command; `{file}` becomes a DIMACS path,
    /// otherwise the formula goes to stdin.
    #[arg(long)]
    sat_cmd: Option<String>,
    /// SMT solver command (default `$TWISTC_SMT_CMD`, then `z3 -in`).
    #[arg(long)]
    smt_cmd: Option<String>,
    /// External solver timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

fn parse_encoding(s: &str) -> Result<CardEncoding, String> {
    s.parse()
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            encoding: self.enc.encoding,
            seed: self.seed,
            sat_cmd: self.sat_cmd.clone(),
            smt_cmd: self.smt_cmd.clone(),
            timeout: Duration::from_secs(self.timeout),
            ..SolveOptions::default()
        }
    }
}

/// A failure mapped to its exit code; the message is already formatted.
#[derive(Debug)]
enum Failure {
    User(String),
    Io(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::User(_) => exit::USER,
            Failure::Io(_) => exit::IO,
            Failure::Internal(_) => exit::INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::User(m) | Failure::Io(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(format!("error: {e}"))
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Internal(m) => Failure::Internal(format!("internal error: {m}")),
            SolveError::Solver(m) => Failure::Io(format!("error: {m}")),
        }
    }
}

/// Runs `twistc` with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USER } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.cmd, stdin, out, err).and_then(|code| out.flush().map(|_| code).map_err(Failure::from)) {
        Ok(code) => code,
        Err(f) => {
            let mut msg = f.message().to_string();
            if !msg.ends_with('\n') {
                msg.push('\n');
            }
            let _ = err.write_all(msg.as_bytes());
            f.code()
        }
    }
}

fn execute(cmd: Cmd, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Check(input) => {
            let c = load(&input, stdin, err)?;
            let stats = backend(&c, &input, CardEncoding::Auto)?.stats();
            writeln!(
                out,
                "ok: {} atoms, {} clauses, {} variables",
                stats.n_atoms, stats.n_clauses, stats.n_vars
            )?;
            Ok(exit::OK)
        }
        Cmd::Latex(input) => {
            let c = load(&input, stdin, err)?;
            writeln!(out, "{}", c.latex())?;
            Ok(exit::OK)
        }
        Cmd::Dimacs { input, enc, no_comments } => {
            let c = load(&input, stdin, err)?;
            if c.has_theory() {
                return Err(Failure::User(format!(
                    "error: {} uses arithmetic and has no DIMACS form; use `twistc smt2`",
                    origin(&input)
                )));
            }
            match backend(&c, &input, enc.encoding)? {
                Backend::Sat(db) => out.write_all(emit_dimacs(&db, !no_comments).as_bytes())?,
                Backend::Smt(_) => return Err(Failure::Internal("internal error: expected CNF".into())),
            }
            Ok(exit::OK)
        }
        Cmd::Smt2 { input, enc, force } => {
            let c = load(&input, stdin, err)?;
            let script = smt::emit(&c.formula, enc.encoding, force)
                .map_err(|e| Failure::User(format!("error: {}: {e}", origin(&input))))?;
            out.write_all(script.text().as_bytes())?;
            Ok(exit::OK)
        }
        Cmd::Solve {
            input,
            limit,
            filter,
            true_only,
            false_only,
            json,
            solver,
        } => {
            let polarity = match (true_only, false_only) {
                (true, _) => Polarity::TrueOnly,
                (_, true) => Polarity::FalseOnly,
                _ => Polarity::All,
            };
            let c = load(&input, stdin, err)?;
            let opts = solver.options();
            let b = backend(&c, &input, opts.encoding)?;
            let mut e = Enumerator::new(&c, b, &opts);
            let mut models: Vec<Found> = Vec::new();
            let mut last = Step::Exhausted;
            while (models.len() as u64) < limit {
                match e.next_model()? {
                    Step::Model(f) => {
                        let f = f
                            .filtered(&filter, polarity)
                            .map_err(|e| Failure::User(format!("error: {e}")))?;
                        models.push(f);
                    }
                    s => {
                        last = s;
                        break;
                    }
                }
            }
            let status = match (models.is_empty(), &last) {
                (false, _) => Status::Sat,
                (true, Step::Unknown) => Status::Unknown,
                _ => Status::Unsat,
            };
            if json {
                let report = SolveReport {
                    status,
                    exhausted: matches!(last, Step::Exhausted) && (models.len() as u64) < limit,
                    models,
                };
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Failure::Internal(format!("internal error: {e}")))?;
                writeln!(out, "{text}")?;
            } else {
                write_models(out, &models, limit > 1)?;
                match status {
                    Status::Unsat => writeln!(out, "unsat")?,
                    Status::Unknown => writeln!(out, "unknown")?,
                    Status::Sat if matches!(last, Step::Unknown) => {
                        writeln!(err, "note: solver gave up after {} model(s)", models.len())?
                    }
                    Status::Sat => {}
                }
            }
            Ok(status.code())
        }
        Cmd::Count { input, limit, solver } => {
            let c = load(&input, stdin, err)?;
            let opts = solver.options();
            let b = backend(&c, &input, opts.encoding)?;
            let mut e = Enumerator::new(&c, b, &opts);
            let mut n = 0u64;
            while n < limit {
                match e.next_model()? {
                    Step::Model(_) => n += 1,
                    Step::Exhausted => break,
                    Step::Unknown => {
                        writeln!(out, "unknown")?;
                        writeln!(err, "note: solver gave up after {n} model(s)")?;
                        return Ok(exit::UNKNOWN);
                    }
                }
            }
            writeln!(out, "{n}")?;
            if n == limit {
                writeln!(err, "note: limit of {limit} reached")?;
            }
            Ok(if n == 0 { exit::UNSAT } else { exit::OK })
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl Status {
    fn code(self) -> i32 {
        match self {
            Status::Sat => exit::OK,
            Status::Unsat => exit::UNSAT,
            Status::Unknown => exit::UNKNOWN,
        }
    }
}

/// JSON output of `solve --json`.
#[derive(Debug, Serialize)]
struct SolveReport {
    status: Status,
    /// True when every model was printed before the limit was reached.
    exhausted: bool,
    models: Vec<Found>,
}

fn write_models(out: &mut dyn Write, models: &[Found], headers: bool) -> io::Result<()> {
    for (i, m) in models.iter().enumerate() {
        if headers {
            writeln!(out, "# model {}", i + 1)?;
        }
        write!(out, "{}", m.rows)?;
        for v in &m.values {
            writeln!(out, "{} = {}", v.name, v.value)?;
        }
    }
    Ok(())
}

fn origin(input: &Input) -> String {
    if input.file.as_os_str() == "-" {
        "<stdin>".to_string()
    } else {
        input.file.display().to_string()
    }
}

fn read_source(input: &Input, stdin: &mut dyn Read) -> Result<String, Failure> {
    let bytes = if input.file.as_os_str() == "-" {
        let mut buf = Vec::new();
        stdin
            .read_to_end(&mut buf)
            .map_err(|e| Failure::Io(format!("error: cannot read <stdin>: {e}")))?;
        buf
    } else {
        fs::read(&input.file).map_err(|e| Failure::Io(format!("error: cannot read {}: {e}", origin(input))))?
    };
    String::from_utf8(bytes).map_err(|_| Failure::User(format!("error: {} is not valid UTF-8", origin(input))))
}

/// Reads and compiles the input. Warnings go to `err`; errors become a
/// user failure carrying every rendered diagnostic.
fn load(input: &Input, stdin: &mut dyn Read, err: &mut dyn Write) -> Result<Compiled, Failure> {
    let src = read_source(input, stdin)?;
    let name = origin(input);
    match compile(&src) {
        Ok(c) => {
            for w in &c.warnings {
                err.write_all(w.render(&c.source, &name).as_bytes())?;
            }
            Ok(c)
        }
        Err(diags) => {
            let src = twist_core::parser::normalize_newlines(&src);
            Err(Failure::User(render_all(&diags, &src, &name)))
        }
    }
}

fn backend(c: &Compiled, input: &Input, enc: CardEncoding) -> Result<Backend, Failure> {
    c.backend(enc)
        .map_err(|d| Failure::User(render_all(&[d], &c.source, &origin(input))))
}

fn render_all(diags: &[Diagnostic], src: &str, origin: &str) -> String {
    diags.iter().map(|d| d.render(src, origin)).collect()
}
