//! Learned-clause activity measures.
//!
//! Every strategy assigns each learned clause a real activity, and the
//! database treats *smaller* activities as *more* relevant: reductions delete
//! from the large end. Strategies differ in the initial value and in which
//! search events, if any, may lower it afterwards:
//!
//! | kind             | initial activity                       | updated on          |
//! |------------------|----------------------------------------|---------------------|
//! | `size`           | `|c|`                                  | never               |
//! | `rand`           | `drand()`                              | never               |
//! | `fifo`           | `-birth`                               | never               |
//! | `sbr`            | `|c|` if `|c| <= k`, else `k + drand()` | never               |
//! | `sized`          | `|c|`                                  | reason use at `d`   |
//! | `sizekd`         | `|c|` if `|c| <= k`, else `k + |c|`    | reason use at `d`   |
//! | `reld`           | sum of literal levels                  | reason use          |
//! | `lbd`            | LBD at learning time                   | never               |
//! | `lbdd`           | LBD at learning time                   | conflict analysis   |
//! | `glucose-sizekd` | `|c|` if `|c| < k`, else `k + |c|`     | conflict analysis   |
//! | `glucose-sbr`    | `|c|` if `|c| <= k`, else `k + irand(|V|)` | never           |

use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::clause_db::Schedule;
use crate::prng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Size,
    Rand,
    Fifo,
    Sbr,
    SizeD,
    SizeKD,
    RelD,
    LbdStatic,
    LbdDynamic,
    GlucoseSizeKD,
    GlucoseSbr,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 11] = [
        StrategyKind::Size,
        StrategyKind::Rand,
        StrategyKind::Fifo,
        StrategyKind::Sbr,
        StrategyKind::SizeD,
        StrategyKind::SizeKD,
        StrategyKind::RelD,
        StrategyKind::LbdStatic,
        StrategyKind::LbdDynamic,
        StrategyKind::GlucoseSizeKD,
        StrategyKind::GlucoseSbr,
    ];

    /// Name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Size => "size",
            StrategyKind::Rand => "rand",
            StrategyKind::Fifo => "fifo",
            StrategyKind::Sbr => "sbr",
            StrategyKind::SizeD => "sized",
            StrategyKind::SizeKD => "sizekd",
            StrategyKind::RelD => "reld",
            StrategyKind::LbdStatic => "lbd",
            StrategyKind::LbdDynamic => "lbdd",
            StrategyKind::GlucoseSizeKD => "glucose-sizekd",
            StrategyKind::GlucoseSbr => "glucose-sbr",
        }
    }

    pub fn uses_k(self) -> bool {
        self.default_k().is_some()
    }

    pub fn default_k(self) -> Option<u32> {
        match self {
            StrategyKind::Sbr | StrategyKind::SizeKD | StrategyKind::GlucoseSizeKD => Some(12),
            StrategyKind::GlucoseSbr => Some(15),
            _ => None,
        }
    }

    /// The Glucose-flavoured kinds default to the Glucose reduction
    /// schedule, everything else to MiniSAT's.
    pub fn default_schedule(self) -> Schedule {
        match self {
            StrategyKind::LbdDynamic | StrategyKind::GlucoseSizeKD | StrategyKind::GlucoseSbr => Schedule::Glucose,
            _ => Schedule::Minisat,
        }
    }

    /// Whether activities can change after the clause is learned.
    pub fn is_dynamic(self) -> bool {
        self.updates_on_reason() || self.updates_on_analysis()
    }

    pub fn updates_on_reason(self) -> bool {
        matches!(self, StrategyKind::SizeD | StrategyKind::SizeKD | StrategyKind::RelD)
    }

    pub fn updates_on_analysis(self) -> bool {
        matches!(self, StrategyKind::LbdDynamic | StrategyKind::GlucoseSizeKD)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("unknown strategy `{0}`")]
    UnknownKind(alloc::string::String),
    #[error("strategy {0} needs a threshold k >= 1")]
    MissingThreshold(StrategyKind),
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "size" => StrategyKind::Size,
            "rand" | "random" => StrategyKind::Rand,
            "fifo" => StrategyKind::Fifo,
            "sbr" => StrategyKind::Sbr,
            "sized" => StrategyKind::SizeD,
            "sizekd" => StrategyKind::SizeKD,
            "reld" => StrategyKind::RelD,
            "lbd" | "lbd-static" => StrategyKind::LbdStatic,
            "lbdd" | "lbd-dynamic" => StrategyKind::LbdDynamic,
            "glucose-sizekd" => StrategyKind::GlucoseSizeKD,
            "glucose-sbr" => StrategyKind::GlucoseSbr,
            _ => return Err(StrategyError::UnknownKind(s.into())),
        };
        Ok(kind)
    }
}

/// Strategy kind, threshold and PRNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Size threshold; ignored by kinds that do not use one.
    pub k: u32,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> StrategyConfig {
        StrategyConfig { kind, k: kind.default_k().unwrap_or(0), seed: 91648253 }
    }

    pub fn with_k(mut self, k: u32) -> StrategyConfig {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> StrategyConfig {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        if self.kind.uses_k() && self.k == 0 {
            return Err(StrategyError::MissingThreshold(self.kind));
        }
        Ok(())
    }

    /// Short label such as `sbr(12)` or `size`.
    pub fn label(&self) -> alloc::string::String {
        if self.kind.uses_k() {
            alloc::format!("{}({})", self.kind, self.k)
        } else {
            alloc::string::String::from(self.kind.name())
        }
    }
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig::new(StrategyKind::Sbr)
    }
}

// The individual measures. Each is a plain function so it can be checked in
// isolation; `Strategy` only dispatches.

pub fn size_initial(size: usize) -> f64 {
    size as f64
}

pub fn rand_initial(rng: &mut Rng) -> f64 {
    rng.drand()
}

/// Older clauses get larger activities and so are deleted first.
pub fn fifo_initial(birth: u64) -> f64 {
    -(birth as f64)
}

/// Short clauses (`|c| <= k`) rank by size; longer ones get `k + r` with
/// `r` in `[0, 1)`, below every short clause in relevance.
pub fn sbr_initial(size: usize, k: u32, rng: &mut Rng) -> f64 {
    if size <= k as usize {
        size as f64
    } else {
        k as f64 + rng.drand()
    }
}

pub fn sized_initial(size: usize) -> f64 {
    size as f64
}

/// The clause propagated a literal at decision level `level`.
pub fn sized_on_reason(activity: f64, level: u32) -> f64 {
    activity.min(level as f64)
}

pub fn sizekd_initial(size: usize, k: u32) -> f64 {
    if size <= k as usize {
        size as f64
    } else {
        (k as usize + size) as f64
    }
}

pub fn sizekd_on_reason(activity: f64, k: u32, level: u32) -> f64 {
    let candidate = k as f64 + level as f64;
    if candidate < activity {
        candidate
    } else {
        activity
    }
}

/// `sum_i i * |c^i|` over the decision levels of the clause's literals,
/// which is just the sum of those levels.
pub fn reld_activity<I: IntoIterator<Item = u32>>(levels: I) -> f64 {
    levels.into_iter().map(u64::from).sum::<u64>() as f64
}

/// Keeps the recomputed value only when it is strictly better.
pub fn reld_on_reason(activity: f64, recomputed: f64) -> f64 {
    if recomputed < activity {
        recomputed
    } else {
        activity
    }
}

pub fn lbd_static_initial(lbd: u32) -> f64 {
    lbd as f64
}

pub fn lbd_dynamic_on_analysis(activity: f64, recomputed_lbd: u32) -> f64 {
    activity.min(recomputed_lbd as f64)
}

/// Note the strict `|c| < k` here, unlike [`sizekd_initial`].
pub fn glucose_sizekd_initial(size: usize, k: u32) -> f64 {
    if size < k as usize {
        size as f64
    } else {
        (k as usize + size) as f64
    }
}

/// `conflict_level` is the decision level of the conflict being analysed.
pub fn glucose_sizekd_on_analysis(activity: f64, k: u32, conflict_level: u32) -> f64 {
    sizekd_on_reason(activity, k, conflict_level)
}

pub fn glucose_sbr_initial(size: usize, k: u32, rng: &mut Rng, num_vars: usize) -> f64 {
    if size <= k as usize {
        size as f64
    } else {
        let range = num_vars.clamp(1, u32::MAX as usize) as u32;
        (k + rng.irand(range)) as f64
    }
}

/// What a strategy may look at when a clause is learned. All literals are
/// assigned at this point (the conflict has not been undone yet).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnContext {
    pub size: usize,
    pub lbd: u32,
    /// Sum of the decision levels of the clause's literals.
    pub level_sum: u64,
    /// Conflict index at which the clause was learned.
    pub birth: u64,
    pub num_vars: usize,
}

/// Dispatches to the activity measure selected by a [`StrategyConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    kind: StrategyKind,
    k: u32,
}

impl Strategy {
    pub fn new(config: &StrategyConfig) -> Result<Strategy, StrategyError> {
        config.validate()?;
        Ok(Strategy { kind: config.kind, k: config.k })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn initial_activity(&self, ctx: &LearnContext, rng: &mut Rng) -> f64 {
        let k = self.k;
        match self.kind {
            StrategyKind::Size => size_initial(ctx.size),
            StrategyKind::Rand => rand_initial(rng),
            StrategyKind::Fifo => fifo_initial(ctx.birth),
            StrategyKind::Sbr => sbr_initial(ctx.size, k, rng),
            StrategyKind::SizeD => sized_initial(ctx.size),
            StrategyKind::SizeKD => sizekd_initial(ctx.size, k),
            StrategyKind::RelD => ctx.level_sum as f64,
            StrategyKind::LbdStatic | StrategyKind::LbdDynamic => lbd_static_initial(ctx.lbd),
            StrategyKind::GlucoseSizeKD => glucose_sizekd_initial(ctx.size, k),
            StrategyKind::GlucoseSbr => glucose_sbr_initial(ctx.size, k, rng, ctx.num_vars),
        }
    }

    /// A stored clause just became the reason of a literal propagated at
    /// `level`. `level_sum` recomputes the sum of the clause's literal levels
    /// over the current trail and is only called by `reld`.
    pub fn on_reason_used(&self, activity: f64, level: u32, level_sum: impl FnOnce() -> u64) -> f64 {
        match self.kind {
            StrategyKind::SizeD => sized_on_reason(activity, level),
            StrategyKind::SizeKD => sizekd_on_reason(activity, self.k, level),
            StrategyKind::RelD => reld_on_reason(activity, level_sum() as f64),
            _ => activity,
        }
    }

    /// A stored clause took part in deriving the asserting clause of a
    /// conflict at `conflict_level`. `lbd` recomputes its LBD over the current
    /// trail and is only called by `lbdd`.
    pub fn on_conflict_analysis(&self, activity: f64, conflict_level: u32, lbd: impl FnOnce() -> u32) -> f64 {
        match self.kind {
            StrategyKind::LbdDynamic => lbd_dynamic_on_analysis(activity, lbd()),
            StrategyKind::GlucoseSizeKD => glucose_sizekd_on_analysis(activity, self.k, conflict_level),
            _ => activity,
        }
    }
}
