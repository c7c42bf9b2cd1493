//! The CDCL search engine.
//!
//! Two-watched-literal propagation, First-UIP conflict analysis with
//! recursive minimization, VSIDS decisions with phase saving and Luby
//! restarts. Everything specific to learned-clause management goes through
//! [`Strategy`](crate::strategy::Strategy) and [`ClauseDb`].

mod luby;
mod order;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::clause_db::{BadDbConfig, ClauseDb, ClauseMeta, ClauseRef, DbConfig, Watcher};
use crate::dimacs::Instance;
use crate::lit::{Lit, Var};
use crate::prng::Rng;
use crate::proof::{ProofSink, SearchObserver};
use crate::strategy::{LearnContext, Strategy, StrategyConfig, StrategyError};

pub use luby::luby;
use order::VarOrder;

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

const VAR_DECAY: f64 = 0.95;
const RESCALE_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Sat,
    Unsat,
    /// A limit was hit first.
    Unknown,
}

impl Answer {
    pub fn name(self) -> &'static str {
        match self {
            Answer::Sat => "SAT",
            Answer::Unsat => "UNSAT",
            Answer::Unknown => "UNKNOWN",
        }
    }
}

impl core::fmt::Display for Answer {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub reductions: u64,
    pub clauses_deleted: u64,
    /// Learned clauses of every size, units included.
    pub learned_clauses: u64,
    /// Largest size the learned database reached.
    pub peak_learned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub answer: Answer,
    /// Value of every variable, indexed by [`Var::index`], when SAT.
    pub model: Option<Vec<bool>>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub strategy: StrategyConfig,
    pub db: DbConfig,
    /// Recursive minimization of learned clauses.
    pub minimize: bool,
    /// Conflicts per Luby unit.
    pub restart_base: u64,
}

impl SolverConfig {
    pub fn new(strategy: StrategyConfig, db: DbConfig) -> SolverConfig {
        SolverConfig { strategy, db, minimize: true, restart_base: 100 }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        let strategy = StrategyConfig::default();
        SolverConfig::new(strategy, DbConfig::with_schedule(strategy.kind.default_schedule()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_conflicts: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Db(#[from] BadDbConfig),
    #[error("restart base must be positive")]
    RestartBase,
    #[error("cannot backjump to level {target} from level {current}")]
    Backjump { target: u32, current: u32 },
    #[error("literal {0} is unassigned")]
    Unassigned(Lit),
}

/// Output of conflict analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    /// Asserting clause; the first literal is the negated first UIP and the
    /// second, if any, has the highest level among the rest.
    pub learned: Vec<Lit>,
    pub backjump_level: u32,
}

/// A CDCL solver over one instance.
///
/// Optional sinks borrowed for `'a` receive the proof, search events, and
/// the termination query.
pub struct Solver<'a> {
    num_vars: usize,
    db: ClauseDb,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    order: VarOrder,
    phase: Vec<bool>,

    seen: Vec<bool>,
    to_clear: Vec<Lit>,
    minimize_stack: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,

    strategy: Strategy,
    rng: Rng,
    config: SolverConfig,
    stats: Stats,
    limits: Limits,
    restart_index: u64,
    conflicts_since_restart: u64,
    ok: bool,

    proof: Option<&'a mut dyn ProofSink>,
    observer: Option<&'a mut dyn SearchObserver>,
    terminate: Option<&'a mut dyn FnMut() -> bool>,
}

impl<'a> Solver<'a> {
    pub fn new(instance: &Instance, config: SolverConfig) -> Result<Solver<'a>, SolverError> {
        let strategy = Strategy::new(&config.strategy)?;
        config.db.validate()?;
        if config.restart_base == 0 {
            return Err(SolverError::RestartBase);
        }
        let n = instance.num_vars;
        let activity = vec![0.0; n];
        let mut order = VarOrder::new(n);
        for v in 0..n {
            order.insert(Var(v as u32), &activity);
        }
        let mut solver = Solver {
            num_vars: n,
            db: ClauseDb::new(n, config.db),
            values: vec![UNDEF; 2 * n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            order,
            phase: vec![false; n],
            seen: vec![false; n],
            to_clear: Vec::new(),
            minimize_stack: Vec::new(),
            level_stamp: vec![0; n + 1],
            stamp: 0,
            strategy,
            rng: Rng::new(config.strategy.seed),
            config,
            stats: Stats::default(),
            limits: Limits::default(),
            restart_index: 1,
            conflicts_since_restart: 0,
            ok: !instance.has_empty_clause,
            proof: None,
            observer: None,
            terminate: None,
        };
        for clause in &instance.clauses {
            solver.add_problem_clause(clause.lits());
        }
        solver.db.start_search();
        Ok(solver)
    }

    fn add_problem_clause(&mut self, lits: &[Lit]) {
        match lits {
            [] => self.ok = false,
            [unit] => match self.lit_value(*unit) {
                UNDEF => self.enqueue(*unit, None),
                FALSE => self.ok = false,
                _ => {}
            },
            _ => {
                self.db.add_original(lits.to_vec());
            }
        }
    }

    pub fn set_proof(&mut self, sink: &'a mut dyn ProofSink) {
        self.proof = Some(sink);
    }

    pub fn set_observer(&mut self, observer: &'a mut dyn SearchObserver) {
        self.observer = Some(observer);
    }

    /// Polled once per conflict; returning `true` stops the search with
    /// [`Answer::Unknown`].
    pub fn set_terminate(&mut self, terminate: &'a mut dyn FnMut() -> bool) {
        self.terminate = Some(terminate);
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    /// False once a contradiction at level 0 is known, e.g. from
    /// complementary unit clauses in the input.
    pub fn is_consistent(&self) -> bool {
        self.ok
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn db(&self) -> &ClauseDb {
        &self.db
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn var_activity(&self, v: Var) -> f64 {
        self.activity[v.index()]
    }

    pub fn saved_phase(&self, v: Var) -> bool {
        self.phase[v.index()]
    }

    /// Decision level of an assigned variable.
    pub fn level_of(&self, v: Var) -> Option<u32> {
        (self.values[v.lit(true).code()] != UNDEF).then(|| self.level[v.index()])
    }

    pub fn reason_of(&self, v: Var) -> Option<ClauseRef> {
        self.reason[v.index()]
    }

    /// `Some(true)` if the literal is true under the current assignment.
    pub fn value(&self, lit: Lit) -> Option<bool> {
        match self.values[lit.code()] {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    /// `(birth, activity)` of every stored learned clause.
    pub fn learned_activities(&self) -> Vec<(u64, f64)> {
        let db = &self.db;
        db.learned()
            .iter()
            .map(|&c| {
                let m = db.meta(c);
                (m.birth, m.activity)
            })
            .collect()
    }

    #[inline]
    fn lit_value(&self, lit: Lit) -> i8 {
        self.values[lit.code()]
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        debug_assert_eq!(self.lit_value(lit), UNDEF);
        let v = lit.var().index();
        self.values[lit.code()] = TRUE;
        self.values[(!lit).code()] = FALSE;
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Opens a new decision level and assigns `lit` there.
    ///
    /// Panics if `lit` is already assigned.
    pub fn push_decision(&mut self, lit: Lit) {
        assert_eq!(self.lit_value(lit), UNDEF, "decision on an assigned literal");
        self.trail_lim.push(self.trail.len());
        self.enqueue(lit, None);
    }

    /// Picks the unassigned variable of highest activity (lowest index on
    /// ties), assigns it its saved phase at a new decision level, and returns
    /// the decision. `None` when every variable is assigned.
    pub fn decide(&mut self) -> Option<Lit> {
        let var = loop {
            let v = self.order.pop(&self.activity)?;
            if self.values[v.lit(true).code()] == UNDEF {
                break v;
            }
        };
        let lit = var.lit(self.phase[var.index()]);
        self.stats.decisions += 1;
        self.push_decision(lit);
        Some(lit)
    }

    /// Unit propagation to fixpoint. Returns the first falsified clause, if
    /// any.
    pub fn propagate(&mut self) -> Option<ClauseRef> {
        let reason_hook = self.strategy.kind().updates_on_reason();
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.db.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.values[w.blocker.code()] == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let clause = &mut self.db.clauses[cref.index()];
                let lits = &mut clause.lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher { cref, blocker: first };
                if first != w.blocker && self.values[first.code()] == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                for k in 2..lits.len() {
                    if self.values[lits[k].code()] != FALSE {
                        lits.swap(1, k);
                        let watch_on = !lits[1];
                        self.db.watches[watch_on.code()].push(kept);
                        continue 'watchers;
                    }
                }
                ws[j] = kept;
                j += 1;
                if self.values[first.code()] == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    let learnt = clause.learnt;
                    self.enqueue(first, Some(cref));
                    let level = self.decision_level();
                    // Literals fixed at level 0 stay fixed; the clause is
                    // satisfied for good and its ranking no longer matters.
                    if learnt && reason_hook && level > 0 {
                        self.reason_used(cref, level);
                    }
                }
            }
            ws.truncate(j);
            self.db.watches[p.code()] = ws;
        }
        conflict
    }

    fn reason_used(&mut self, cref: ClauseRef, level: u32) {
        let clause = &mut self.db.clauses[cref.index()];
        let levels = &self.level;
        let before = clause.meta.activity;
        let lits = &clause.lits;
        let after =
            self.strategy.on_reason_used(before, level, || lits.iter().map(|l| levels[l.var().index()] as u64).sum());
        clause.meta.activity = after;
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.activity_updated(clause.meta.birth, before, after);
        }
    }

    fn bump(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > RESCALE_LIMIT {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    /// First-UIP analysis of a falsified clause at the current (nonzero)
    /// decision level.
    ///
    /// Bumps every variable met during resolution and notifies the strategy
    /// of each learned clause resolved on.
    pub fn analyze_conflict(&mut self, conflict: ClauseRef) -> Analysis {
        let current = self.decision_level();
        assert!(current > 0, "conflict at level 0 means the formula is unsatisfiable");
        let analysis_hook = self.strategy.kind().updates_on_analysis();

        let mut learned: Vec<Lit> = vec![Lit::from_code(0)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut confl = conflict;
        let mut pivot: Option<Lit> = None;
        loop {
            if analysis_hook && self.db.clauses[confl.index()].learnt {
                self.analysis_used(confl, current);
            }
            let skip = pivot.is_some() as usize;
            let n = self.db.clauses[confl.index()].lits.len();
            for k in skip..n {
                let q = self.db.clauses[confl.index()].lits[k];
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.bump(v);
                    self.seen[v.index()] = true;
                    if self.level[v.index()] >= current {
                        pending += 1;
                    } else {
                        learned.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let p = self.trail[index];
            pivot = Some(p);
            self.seen[p.var().index()] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            confl = self.reason[p.var().index()].expect("implied literal has a reason");
        }
        learned[0] = !pivot.expect("at least one resolution step");

        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learned);
        if self.config.minimize {
            let abstract_levels = learned[1..].iter().fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
            let mut kept = 1;
            for i in 1..learned.len() {
                let l = learned[i];
                if self.reason[l.var().index()].is_none() || !self.redundant(l, abstract_levels) {
                    learned[kept] = l;
                    kept += 1;
                }
            }
            learned.truncate(kept);
        }
        for l in core::mem::take(&mut self.to_clear) {
            self.seen[l.var().index()] = false;
        }

        let backjump_level = if learned.len() == 1 {
            0
        } else {
            let mut max = 1;
            for i in 2..learned.len() {
                if self.level[learned[i].var().index()] > self.level[learned[max].var().index()] {
                    max = i;
                }
            }
            learned.swap(1, max);
            self.level[learned[1].var().index()]
        };
        Analysis { learned, backjump_level }
    }

    fn analysis_used(&mut self, cref: ClauseRef, conflict_level: u32) {
        self.stamp += 1;
        let stamp = self.stamp;
        let clause = &mut self.db.clauses[cref.index()];
        let (levels, level_stamp) = (&self.level, &mut self.level_stamp);
        let lits = &clause.lits;
        let before = clause.meta.activity;
        let after = self
            .strategy
            .on_conflict_analysis(before, conflict_level, || distinct_levels(lits, levels, level_stamp, stamp));
        clause.meta.activity = after;
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.activity_updated(clause.meta.birth, before, after);
        }
    }

    #[inline]
    fn abstract_level(&self, v: Var) -> u32 {
        1 << (self.level[v.index()] & 31)
    }

    /// Whether `lit` is implied by other literals of the learned clause
    /// through reason clauses.
    fn redundant(&mut self, lit: Lit, abstract_levels: u32) -> bool {
        self.minimize_stack.clear();
        self.minimize_stack.push(lit);
        let top = self.to_clear.len();
        while let Some(q) = self.minimize_stack.pop() {
            let cref = self.reason[q.var().index()].expect("only implied literals are expanded");
            let n = self.db.clauses[cref.index()].lits.len();
            for k in 1..n {
                let l = self.db.clauses[cref.index()].lits[k];
                let v = l.var().index();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v].is_some() && self.abstract_level(l.var()) & abstract_levels != 0 {
                    self.seen[v] = true;
                    self.minimize_stack.push(l);
                    self.to_clear.push(l);
                } else {
                    for c in self.to_clear.drain(top..) {
                        self.seen[c.var().index()] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    /// Undoes every assignment above `level`, saving the phases of the
    /// undone variables.
    pub fn backjump(&mut self, level: u32) -> Result<(), SolverError> {
        let current = self.decision_level();
        if level > current {
            return Err(SolverError::Backjump { target: level, current });
        }
        self.cancel_until(level);
        Ok(())
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var();
            self.phase[v.index()] = lit.is_positive();
            self.values[lit.code()] = UNDEF;
            self.values[(!lit).code()] = UNDEF;
            self.reason[v.index()] = None;
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.qhead = start;
        self.trail_lim.truncate(level as usize);
    }

    /// Sizes of the level blocks of a clause: level -> number of literals
    /// assigned at that level.
    pub fn level_blocks(&self, lits: &[Lit]) -> Result<BTreeMap<u32, usize>, SolverError> {
        let mut blocks = BTreeMap::new();
        for &l in lits {
            let level = self.level_of(l.var()).ok_or(SolverError::Unassigned(l))?;
            *blocks.entry(level).or_insert(0) += 1;
        }
        Ok(blocks)
    }

    /// Number of distinct decision levels among the clause's literals.
    pub fn compute_lbd(&mut self, lits: &[Lit]) -> Result<u32, SolverError> {
        if let Some(&l) = lits.iter().find(|l| self.values[l.code()] == UNDEF) {
            return Err(SolverError::Unassigned(l));
        }
        self.stamp += 1;
        Ok(distinct_levels(lits, &self.level, &mut self.level_stamp, self.stamp))
    }

    /// Whether the current Luby run has used up its conflicts.
    pub fn should_restart(&self) -> bool {
        self.conflicts_since_restart >= self.config.restart_base * luby(self.restart_index)
    }

    fn restart(&mut self) {
        self.cancel_until(0);
        self.stats.restarts += 1;
        self.restart_index += 1;
        self.conflicts_since_restart = 0;
    }

    /// Deletes the less relevant half of the deletable learned clauses;
    /// clauses that are reasons on the trail are kept.
    pub fn reduce(&mut self) {
        let mut locked: Vec<ClauseRef> = self.trail.iter().filter_map(|l| self.reason[l.var().index()]).collect();
        locked.sort_unstable();
        let proof = &mut self.proof;
        let observer = &mut self.observer;
        let deleted = self.db.reduce(
            |c| locked.binary_search(&c).is_ok(),
            |lits, meta| {
                if let Some(p) = proof.as_deref_mut() {
                    p.delete(lits);
                }
                if let Some(o) = observer.as_deref_mut() {
                    o.deleted(meta.birth);
                }
            },
        );
        self.stats.reductions += 1;
        self.stats.clauses_deleted += deleted as u64;
    }

    /// Records a learned clause: logs it, computes its activity while the
    /// conflict is still on the trail, backjumps, and asserts its first
    /// literal. Units are asserted at level 0 and not stored.
    pub fn learn(&mut self, analysis: Analysis) {
        let Analysis { learned, backjump_level } = analysis;
        let birth = self.stats.conflicts;
        self.stats.learned_clauses += 1;
        if let Some(p) = self.proof.as_deref_mut() {
            p.add(&learned);
        }
        self.stamp += 1;
        let lbd = distinct_levels(&learned, &self.level, &mut self.level_stamp, self.stamp);

        if learned.len() == 1 {
            self.cancel_until(0);
            self.enqueue(learned[0], None);
            if let Some(o) = self.observer.as_deref_mut() {
                o.learned(birth, &learned, lbd, None);
            }
            return;
        }

        let ctx = LearnContext {
            size: learned.len(),
            lbd,
            level_sum: learned.iter().map(|l| self.level[l.var().index()] as u64).sum(),
            birth,
            num_vars: self.num_vars,
        };
        let activity = self.strategy.initial_activity(&ctx, &mut self.rng);
        if let Some(o) = self.observer.as_deref_mut() {
            o.learned(birth, &learned, lbd, Some(activity));
        }
        self.cancel_until(backjump_level);
        let asserting = learned[0];
        let cref = self.db.add_learned(learned, ClauseMeta { activity, lbd, birth });
        self.enqueue(asserting, Some(cref));
        self.stats.peak_learned = self.stats.peak_learned.max(self.db.num_learned() as u64);
    }

    fn unsat(&mut self) -> SolveResult {
        self.ok = false;
        if let Some(p) = self.proof.as_deref_mut() {
            p.conclude_unsat();
        }
        self.result(Answer::Unsat)
    }

    fn result(&self, answer: Answer) -> SolveResult {
        let model = (answer == Answer::Sat)
            .then(|| (0..self.num_vars).map(|v| self.values[Var(v as u32).lit(true).code()] == TRUE).collect());
        SolveResult { answer, model, stats: self.stats }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.limits.max_conflicts.is_some_and(|m| self.stats.conflicts >= m) {
            return true;
        }
        self.terminate.as_deref_mut().is_some_and(|t| t())
    }

    /// Runs the search to completion or until a limit triggers.
    pub fn solve(&mut self) -> SolveResult {
        if !self.ok {
            return self.unsat();
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            return self.unsat();
        }
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                self.conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    return self.unsat();
                }
                let analysis = self.analyze_conflict(conflict);
                self.learn(analysis);
                self.var_inc /= VAR_DECAY;
                self.db.on_conflict();
                if self.out_of_budget() {
                    self.cancel_until(0);
                    return self.result(Answer::Unknown);
                }
            } else {
                if self.should_restart() {
                    self.restart();
                }
                if self.db.should_reduce(self.trail.len()) {
                    self.reduce();
                }
                if self.decide().is_none() {
                    return self.result(Answer::Sat);
                }
            }
        }
    }
}

fn distinct_levels(lits: &[Lit], levels: &[u32], level_stamp: &mut [u64], stamp: u64) -> u32 {
    let mut count = 0;
    for l in lits {
        let lv = levels[l.var().index()] as usize;
        if level_stamp[lv] != stamp {
            level_stamp[lv] = stamp;
            count += 1;
        }
    }
    count
}

/// Solves `instance` with a fresh solver.
pub fn solve(
    instance: &Instance,
    strategy: StrategyConfig,
    db: DbConfig,
    limits: Limits,
) -> Result<SolveResult, SolverError> {
    let mut solver = Solver::new(instance, SolverConfig::new(strategy, db))?;
    solver.set_limits(limits);
    Ok(solver.solve())
}
