//! Event sinks attached to a running solver.

use crate::lit::Lit;

/// Receives the clausal proof: every derived clause, every deletion of a
/// learned clause, and the final empty clause on UNSAT.
///
/// Implementations that write somewhere fallible should latch the first
/// error and report it after solving.
pub trait ProofSink {
    fn add(&mut self, lits: &[Lit]);
    fn delete(&mut self, lits: &[Lit]);
    /// The empty clause has been derived.
    fn conclude_unsat(&mut self) {
        self.add(&[]);
    }
}

/// Observes learned-clause bookkeeping. Learned clauses are identified by
/// their birth, the conflict index at which they were learned, which is
/// unique within a run.
#[allow(unused_variables)]
pub trait SearchObserver {
    /// A clause was learned. `lbd` and `activity` are the values computed at
    /// learning time; unit clauses are reported with `activity = None` since
    /// they never enter the database.
    fn learned(&mut self, birth: u64, lits: &[Lit], lbd: u32, activity: Option<f64>) {}
    /// A strategy hook ran on a stored clause; `after` is the activity once
    /// the hook is done (possibly equal to `before`).
    fn activity_updated(&mut self, birth: u64, before: f64, after: f64) {}
    fn deleted(&mut self, birth: u64) {}
}
