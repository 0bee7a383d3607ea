//! Compiler core for the `.tw` propositional modelling language: parsing,
//! grounding, clause generation, a CDCL solver and SMT-LIB emission.

pub mod ast;
pub mod card;
pub mod cnf;
pub mod diag;
pub mod ground;
pub mod modelview;
pub mod parser;
pub mod pipeline;
pub mod process;
pub mod render;
pub mod sat;
pub mod smt;
pub mod value;

pub use ast::{Program, Span};
pub use diag::{Diagnostic, Severity};
pub use parser::{parse, parse_with_warnings};
