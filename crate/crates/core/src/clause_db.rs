//! Clause storage, watch lists, and the learned-clause reduction policy.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::lit::Lit;

/// Handle to a stored clause. Slots of deleted clauses are recycled, so a
/// handle is only meaningful while its clause is alive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseRef(u32);

impl ClauseRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Per-learned-clause bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClauseMeta {
    /// Smaller is more relevant.
    pub activity: f64,
    pub lbd: u32,
    /// Conflict index at which the clause was learned.
    pub birth: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct StoredClause {
    pub(crate) lits: Vec<Lit>,
    pub(crate) learnt: bool,
    deleted: bool,
    pub(crate) meta: ClauseMeta,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Watcher {
    pub(crate) cref: ClauseRef,
    pub(crate) blocker: Lit,
}

/// When reductions happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schedule {
    /// Reduce once the learned clauses outnumber the assigned variables by
    /// `max_learnts`, a limit that grows geometrically with the conflicts.
    Minisat,
    /// Reduce every `first + inc * r` conflicts, `r` being the number of
    /// reductions so far.
    Glucose,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Minisat => "minisat",
            Schedule::Glucose => "glucose",
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown reduction schedule `{0}` (expected minisat or glucose)")]
pub struct UnknownSchedule(pub alloc::string::String);

impl FromStr for Schedule {
    type Err = UnknownSchedule;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "minisat" => Ok(Schedule::Minisat),
            "glucose" => Ok(Schedule::Glucose),
            _ => Err(UnknownSchedule(s.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbConfig {
    pub schedule: Schedule,
    pub learntsize_factor: f64,
    pub learntsize_inc: f64,
    pub adjust_start: u64,
    pub adjust_inc: f64,
    pub glucose_first: u64,
    pub glucose_inc: u64,
}

impl Default for DbConfig {
    fn default() -> Self {
        DbConfig {
            schedule: Schedule::Minisat,
            learntsize_factor: 1.0 / 3.0,
            learntsize_inc: 1.1,
            adjust_start: 100,
            adjust_inc: 1.5,
            glucose_first: 2000,
            glucose_inc: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("database parameter `{0}` must be positive")]
pub struct BadDbConfig(pub &'static str);

impl DbConfig {
    pub fn with_schedule(schedule: Schedule) -> DbConfig {
        DbConfig { schedule, ..DbConfig::default() }
    }

    pub fn validate(&self) -> Result<(), BadDbConfig> {
        let checks: [(&'static str, bool); 6] = [
            ("learntsize_factor", self.learntsize_factor > 0.0),
            ("learntsize_inc", self.learntsize_inc > 0.0),
            ("adjust_start", self.adjust_start > 0),
            ("adjust_inc", self.adjust_inc > 0.0),
            ("glucose_first", self.glucose_first > 0),
            ("glucose_inc", self.glucose_inc > 0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(BadDbConfig(name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
enum ScheduleState {
    Minisat { max_learnts: f64, adjust_confl: f64, adjust_cnt: u64 },
    Glucose { since_reduce: u64 },
}

/// Original and learned clauses plus the two-watched-literal index.
#[derive(Debug, Clone)]
pub struct ClauseDb {
    pub(crate) clauses: Vec<StoredClause>,
    free: Vec<u32>,
    pub(crate) watches: Vec<Vec<Watcher>>,
    learnts: Vec<ClauseRef>,
    num_original: usize,
    config: DbConfig,
    state: ScheduleState,
    reductions: u64,
}

impl ClauseDb {
    pub fn new(num_vars: usize, config: DbConfig) -> ClauseDb {
        let state = match config.schedule {
            Schedule::Minisat => ScheduleState::Minisat {
                max_learnts: 0.0,
                adjust_confl: config.adjust_start as f64,
                adjust_cnt: config.adjust_start,
            },
            Schedule::Glucose => ScheduleState::Glucose { since_reduce: 0 },
        };
        ClauseDb {
            clauses: Vec::new(),
            free: Vec::new(),
            watches: (0..2 * num_vars).map(|_| Vec::new()).collect(),
            learnts: Vec::new(),
            num_original: 0,
            config,
            state,
            reductions: 0,
        }
    }

    pub fn config(&self) -> &DbConfig {
        &self.config
    }

    fn insert(&mut self, lits: Vec<Lit>, learnt: bool, meta: ClauseMeta) -> ClauseRef {
        assert!(lits.len() >= 2, "stored clauses need two literals to watch");
        let (a, b) = (lits[0], lits[1]);
        let clause = StoredClause { lits, learnt, deleted: false, meta };
        let cref = match self.free.pop() {
            Some(slot) => {
                self.clauses[slot as usize] = clause;
                ClauseRef(slot)
            }
            None => {
                self.clauses.push(clause);
                ClauseRef(self.clauses.len() as u32 - 1)
            }
        };
        self.watches[(!a).code()].push(Watcher { cref, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref, blocker: a });
        cref
    }

    /// Stores a problem clause of at least two literals, watching the first
    /// two.
    pub fn add_original(&mut self, lits: Vec<Lit>) -> ClauseRef {
        self.num_original += 1;
        let meta = ClauseMeta { activity: 0.0, lbd: 0, birth: 0 };
        self.insert(lits, false, meta)
    }

    /// Stores a learned clause of at least two literals, watching the first
    /// two.
    pub fn add_learned(&mut self, lits: Vec<Lit>, meta: ClauseMeta) -> ClauseRef {
        let cref = self.insert(lits, true, meta);
        self.learnts.push(cref);
        cref
    }

    pub fn lits(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref.index()].lits
    }

    pub fn is_learned(&self, cref: ClauseRef) -> bool {
        self.clauses[cref.index()].learnt
    }

    pub fn meta(&self, cref: ClauseRef) -> &ClauseMeta {
        &self.clauses[cref.index()].meta
    }

    pub fn meta_mut(&mut self, cref: ClauseRef) -> &mut ClauseMeta {
        &mut self.clauses[cref.index()].meta
    }

    pub fn learned(&self) -> &[ClauseRef] {
        &self.learnts
    }

    pub fn num_learned(&self) -> usize {
        self.learnts.len()
    }

    pub fn num_original(&self) -> usize {
        self.num_original
    }

    pub fn reductions(&self) -> u64 {
        self.reductions
    }

    /// Current MiniSAT limit; `None` under the Glucose schedule.
    pub fn max_learnts(&self) -> Option<f64> {
        match self.state {
            ScheduleState::Minisat { max_learnts, .. } => Some(max_learnts),
            ScheduleState::Glucose { .. } => None,
        }
    }

    /// Conflicts that must elapse between the previous reduction and the next
    /// one under the Glucose schedule.
    pub fn glucose_interval(&self) -> u64 {
        self.config.glucose_first + self.config.glucose_inc * self.reductions
    }

    /// Sets the initial MiniSAT limit from the number of problem clauses.
    pub fn start_search(&mut self) {
        if let ScheduleState::Minisat { max_learnts, .. } = &mut self.state {
            *max_learnts = self.num_original as f64 * self.config.learntsize_factor;
        }
    }

    /// Advances the schedule counters by one conflict.
    pub fn on_conflict(&mut self) {
        match &mut self.state {
            ScheduleState::Minisat { max_learnts, adjust_confl, adjust_cnt } => {
                *adjust_cnt -= 1;
                if *adjust_cnt == 0 {
                    *adjust_confl *= self.config.adjust_inc;
                    *adjust_cnt = (*adjust_confl as u64).max(1);
                    *max_learnts *= self.config.learntsize_inc;
                }
            }
            ScheduleState::Glucose { since_reduce } => *since_reduce += 1,
        }
    }

    /// Whether a reduction is due, given how many variables are assigned.
    pub fn should_reduce(&self, assigned: usize) -> bool {
        match self.state {
            ScheduleState::Minisat { max_learnts, .. } => self.learnts.len() as f64 - assigned as f64 >= max_learnts,
            ScheduleState::Glucose { since_reduce } => since_reduce >= self.glucose_interval(),
        }
    }

    /// Deletes the less relevant half of the deletable learned clauses.
    ///
    /// Deletable means longer than two literals and not `locked`. Those are
    /// ordered by decreasing activity, older first among equals, and the
    /// first `n / 2` are removed. `on_delete` sees each victim before its
    /// literals are released. Returns the number of deleted clauses.
    pub fn reduce(
        &mut self,
        locked: impl Fn(ClauseRef) -> bool,
        mut on_delete: impl FnMut(&[Lit], &ClauseMeta),
    ) -> usize {
        let mut eligible: Vec<ClauseRef> =
            self.learnts.iter().copied().filter(|&c| self.clauses[c.index()].lits.len() > 2 && !locked(c)).collect();
        eligible.sort_by(|&x, &y| deletion_order(self.meta(x), self.meta(y)));
        let victims = &eligible[..eligible.len() / 2];

        for &cref in victims {
            let c = &mut self.clauses[cref.index()];
            on_delete(&c.lits, &c.meta);
            c.deleted = true;
        }
        for list in &mut self.watches {
            list.retain(|w| !self.clauses[w.cref.index()].deleted);
        }
        self.learnts.retain(|c| !self.clauses[c.index()].deleted);
        for &cref in victims {
            let c = &mut self.clauses[cref.index()];
            c.lits = Vec::new();
            self.free.push(cref.0);
        }

        self.reductions += 1;
        if let ScheduleState::Glucose { since_reduce } = &mut self.state {
            *since_reduce = 0;
        }
        victims.len()
    }
}

/// Order in which deletable clauses are removed: larger activity first, then
/// older first.
pub fn deletion_order(a: &ClauseMeta, b: &ClauseMeta) -> Ordering {
    b.activity.total_cmp(&a.activity).then(a.birth.cmp(&b.birth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::collections::HashSet;

    fn ternary(v: u32) -> Vec<Lit> {
        vec![Lit::from_dimacs(v as i32), Lit::from_dimacs(v as i32 + 1), Lit::from_dimacs(v as i32 + 2)]
    }

    fn meta(activity: f64, birth: u64) -> ClauseMeta {
        ClauseMeta { activity, lbd: 2, birth }
    }

    #[test]
    fn halving_deletes_largest_activities() {
        let mut db = ClauseDb::new(20, DbConfig::default());
        for a in 1..=10u64 {
            db.add_learned(ternary(a as u32), meta(a as f64, a));
        }
        let mut gone = vec![];
        let n = db.reduce(|_| false, |_, m| gone.push(m.activity));
        assert_eq!(n, 5);
        assert_eq!(gone, vec![10.0, 9.0, 8.0, 7.0, 6.0]);
        let mut left: Vec<f64> = db.learned().iter().map(|&c| db.meta(c).activity).collect();
        left.sort_by(f64::total_cmp);
        assert_eq!(left, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn locked_clause_survives() {
        let mut db = ClauseDb::new(20, DbConfig::default());
        let mut worst = None;
        for a in 1..=10u64 {
            let c = db.add_learned(ternary(a as u32), meta(a as f64, a));
            if a == 10 {
                worst = Some(c);
            }
        }
        let worst = worst.unwrap();
        db.reduce(|c| c == worst, |_, _| {});
        assert!(db.learned().contains(&worst));
        assert_eq!(db.meta(worst).activity, 10.0);
    }

    #[test]
    fn binary_clauses_are_kept() {
        let mut db = ClauseDb::new(20, DbConfig::default());
        let mut bins = vec![];
        for a in 1..=6u64 {
            let lits = vec![Lit::from_dimacs(a as i32), Lit::from_dimacs(-(a as i32 + 1))];
            bins.push(db.add_learned(lits, meta(1000.0 + a as f64, a)));
        }
        assert_eq!(db.reduce(|_| false, |_, _| {}), 0);
        assert_eq!(db.learned(), &bins[..]);
    }

    #[test]
    fn ties_delete_older_first() {
        let mut db = ClauseDb::new(20, DbConfig::default());
        for b in 1..=4u64 {
            db.add_learned(ternary(b as u32), meta(3.0, b));
        }
        let mut births = vec![];
        db.reduce(|_| false, |_, m| births.push(m.birth));
        assert_eq!(births, vec![1, 2]);
    }

    #[test]
    fn watches_follow_deletions_and_slots_recycle() {
        let mut db = ClauseDb::new(20, DbConfig::default());
        db.add_original(ternary(10));
        for a in 1..=4u64 {
            db.add_learned(ternary(a as u32), meta(a as f64, a));
        }
        db.reduce(|_| false, |_, _| {});
        let live: HashSet<ClauseRef> = db.learned().iter().copied().chain([ClauseRef(0)]).collect();
        let mut watched = 0;
        for (code, list) in db.watches.iter().enumerate() {
            for w in list {
                assert!(live.contains(&w.cref));
                assert!(db.lits(w.cref)[..2].contains(&!Lit::from_code(code)));
                watched += 1;
            }
        }
        assert_eq!(watched, 2 * live.len());
        let c = db.add_learned(ternary(15), meta(0.5, 9));
        assert!(c.index() <= 4, "freed slot reused");
        assert_eq!(db.num_learned(), 3);
    }

    #[test]
    fn minisat_schedule_limits() {
        let mut db = ClauseDb::new(3, DbConfig::default());
        for _ in 0..900 {
            db.add_original(vec![Lit::from_dimacs(1), Lit::from_dimacs(2)]);
        }
        db.start_search();
        assert_eq!(db.max_learnts(), Some(300.0));
        for _ in 0..99 {
            db.on_conflict();
        }
        assert_eq!(db.max_learnts(), Some(300.0));
        db.on_conflict();
        assert!((db.max_learnts().unwrap() - 330.0).abs() < 1e-9);
        // Next growth after another 150 conflicts.
        for _ in 0..149 {
            db.on_conflict();
        }
        assert!((db.max_learnts().unwrap() - 330.0).abs() < 1e-9);
        db.on_conflict();
        assert!((db.max_learnts().unwrap() - 363.0).abs() < 1e-9);
    }

    #[test]
    fn minisat_trigger_counts_assignments() {
        let mut db = ClauseDb::new(40, DbConfig::default());
        for v in 1..=9 {
            db.add_original(ternary(v));
        }
        db.start_search();
        assert_eq!(db.max_learnts(), Some(3.0));
        for a in 1..=3u64 {
            db.add_learned(ternary(20 + a as u32), meta(a as f64, a));
        }
        assert!(db.should_reduce(0));
        assert!(!db.should_reduce(1));
    }

    #[test]
    fn glucose_schedule_intervals() {
        let mut db = ClauseDb::new(4, DbConfig::with_schedule(Schedule::Glucose));
        db.start_search();
        let mut at = vec![];
        for conflict in 1..=10_000u64 {
            db.on_conflict();
            if db.should_reduce(0) {
                at.push(conflict);
                db.reduce(|_| false, |_, _| {});
            }
        }
        assert_eq!(at, vec![2000, 4300, 6900, 9800]);
        assert_eq!(db.max_learnts(), None);
    }

    #[test]
    fn config_validation() {
        assert!(DbConfig::default().validate().is_ok());
        let bad = DbConfig { adjust_inc: 0.0, ..DbConfig::default() };
        assert_eq!(bad.validate(), Err(BadDbConfig("adjust_inc")));
        assert_eq!("GLUCOSE".parse::<Schedule>().unwrap(), Schedule::Glucose);
        assert!("lingeling".parse::<Schedule>().is_err());
    }
}
