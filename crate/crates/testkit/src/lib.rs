//! Reference oracles and generators for the integration tests. Apart from
//! [`checks`], nothing here calls the grounder, the clause generator or the
//! solver of `twist-core`; only its data types are shared.

pub mod checks;
pub mod dpll;
pub mod formulas;
pub mod programs;
pub mod puzzles;
pub mod truth;
