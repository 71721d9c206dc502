//! Zipper-based small-step semantics for a minimal Boolean imperative
//! language, its translation into automata over syntax-tree locations, and
//! removal of silent transitions from those automata.

pub mod ast;
pub mod automaton;
pub mod cli;
pub mod export;
pub mod semantics;
pub mod tauclose;
pub mod zipper;

pub use ast::{parse_program, print_program, Expr, ParseError, Stmt, VName, Val};
pub use automaton::{Action, Automaton, Edge, TAState};
pub use semantics::{run_trace, SemConfig, State, Trace, TraceStatus};
pub use zipper::{StmtLocation, StmtPath, SyntConfig};
