//! Explanations for propositional knowledge bases and weighted belief bases.
//!
//! Knowledge bases are CNF clause sets; an explanation is a set of clause
//! indices. Belief bases attach a positive weight (or a hard tag) to each
//! clause and induce a log-linear distribution over worlds.

pub mod deadline;
pub mod error;
pub mod explanation;
pub mod formula;
pub mod minimal;
pub mod probability;
pub mod sat;

pub use deadline::Deadline;
pub use error::{Error, ParseError, ParseErrorKind, Result};
