//! A CDCL SAT solver whose learned-clause database manager is a pluggable
//! strategy.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Parsing works
//! over `&str`, proofs and search events are pushed through the
//! [`ProofSink`] and [`SearchObserver`] traits, and wall-clock limits are
//! expressed as a caller-supplied termination callback.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clause_db;
pub mod dimacs;
pub mod lit;
pub mod oracle;
pub mod prng;
pub mod proof;
pub mod solver;
pub mod strategy;

pub use clause_db::{ClauseDb, ClauseMeta, ClauseRef, DbConfig, Schedule};
pub use dimacs::{normalize_clause, parse_dimacs, Clause, DimacsError, Instance, Normalized, Parsed};
pub use lit::{Lit, Var};
pub use oracle::{check_model, gen_random_3cnf, solve_bruteforce, OracleError, OracleResult};
pub use prng::Rng;
pub use proof::{ProofSink, SearchObserver};
pub use solver::{solve, Answer, Limits, SolveResult, Solver, SolverConfig, SolverError, Stats};
pub use strategy::{Strategy, StrategyConfig, StrategyKind};
