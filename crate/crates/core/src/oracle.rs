//! Brute-force satisfiability oracle, model checker, and random 3-CNF
//! generator.
//!
//! Nothing here shares code with the CDCL engine: the oracle enumerates
//! assignments by depth-first search over variables in index order and only
//! checks clauses whose highest variable has just been fixed.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dimacs::Instance;
use crate::lit::{Lit, Var};
use crate::prng::Rng;

/// Largest instance the oracle accepts.
pub const MAX_ORACLE_VARS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} variables exceeds the enumeration bound of {MAX_ORACLE_VARS}")]
    TooLarge(usize),
    #[error("model assigns {got} variables, instance has {expected}")]
    IncompleteModel { got: usize, expected: usize },
    #[error("random 3-CNF needs at least 3 variables, got {0}")]
    TooFewVars(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Sat(Vec<bool>),
    Unsat,
}

impl OracleResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleResult::Sat(_))
    }
}

fn lit_true(l: Lit, model: &[bool]) -> bool {
    model[l.var().index()] == l.is_positive()
}

/// Exhaustive search with early pruning on falsified clauses.
pub fn solve_bruteforce(instance: &Instance) -> Result<OracleResult, OracleError> {
    let n = instance.num_vars;
    if n > MAX_ORACLE_VARS {
        return Err(OracleError::TooLarge(n));
    }
    if instance.has_empty_clause {
        return Ok(OracleResult::Unsat);
    }
    // Clauses grouped by their highest variable: they become decided exactly
    // when that variable is assigned.
    let mut closing: Vec<Vec<&[Lit]>> = vec![Vec::new(); n];
    for c in &instance.clauses {
        let top = c.lits().iter().map(|l| l.var().index()).max().expect("stored clauses are nonempty");
        closing[top].push(c.lits());
    }
    if n == 0 {
        return Ok(OracleResult::Sat(Vec::new()));
    }

    let mut model = vec![false; n];
    // tried[v] = how many values of v have been attempted at this depth.
    let mut tried = vec![0u8; n];
    let mut depth = 0usize;
    loop {
        if tried[depth] == 2 {
            tried[depth] = 0;
            if depth == 0 {
                return Ok(OracleResult::Unsat);
            }
            depth -= 1;
            continue;
        }
        model[depth] = tried[depth] == 1;
        tried[depth] += 1;
        let consistent = closing[depth].iter().all(|c| c.iter().any(|&l| lit_true(l, &model)));
        if consistent {
            if depth + 1 == n {
                return Ok(OracleResult::Sat(model));
            }
            depth += 1;
        }
    }
}

/// True iff every clause has a literal satisfied by `model`.
pub fn check_model(instance: &Instance, model: &[bool]) -> Result<bool, OracleError> {
    if model.len() != instance.num_vars {
        return Err(OracleError::IncompleteModel { got: model.len(), expected: instance.num_vars });
    }
    if instance.has_empty_clause {
        return Ok(false);
    }
    Ok(instance.clauses.iter().all(|c| c.lits().iter().any(|&l| lit_true(l, model))))
}

/// `m` clauses over `n` variables, each with three distinct variables drawn
/// uniformly and a fair-coin polarity per literal, all from the MiniSAT
/// generator seeded with `seed`.
pub fn gen_random_3cnf(n: usize, m: usize, seed: u64) -> Result<Instance, OracleError> {
    if n < 3 {
        return Err(OracleError::TooFewVars(n));
    }
    let mut rng = Rng::new(seed);
    let mut instance = Instance::new(n);
    let range = u32::try_from(n).unwrap_or(u32::MAX);
    for _ in 0..m {
        let mut vars = [0u32; 3];
        let mut k = 0;
        while k < 3 {
            let v = rng.irand(range);
            if !vars[..k].contains(&v) {
                vars[k] = v;
                k += 1;
            }
        }
        let lits: Vec<i32> = vars
            .iter()
            .map(|&v| {
                let d = Var(v).dimacs();
                if rng.drand() < 0.5 {
                    d
                } else {
                    -d
                }
            })
            .collect();
        instance.add_clause(&lits);
    }
    Ok(instance)
}
