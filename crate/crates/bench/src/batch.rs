//! Corpus runs, CSV output, and per-configuration summaries.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use redsat_core::{Answer, Schedule, StrategyConfig, StrategyKind};
use thiserror::Error;

use crate::run::{instance_name, read_instance, run_instance, RunConfig, RunError, RunReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 19] = [
    "row",
    "instance",
    "strategy",
    "k",
    "seed",
    "schedule",
    "answer",
    "cpu_time",
    "conflicts",
    "decisions",
    "propagations",
    "restarts",
    "reductions",
    "clauses_deleted",
    "peak_learned",
    "solved",
    "sat",
    "unsat",
    "avg_time",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntryError {
    #[error(transparent)]
    Strategy(#[from] redsat_core::strategy::StrategyError),
    #[error(transparent)]
    Schedule(#[from] redsat_core::clause_db::UnknownSchedule),
    #[error("bad threshold in `{0}`")]
    BadK(String),
    #[error("empty strategy list")]
    Empty,
}

/// One `--strategies` entry: `kind[:k][@schedule]`, e.g. `sbr:12@glucose`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub kind: StrategyKind,
    pub k: Option<u32>,
    pub schedule: Option<Schedule>,
}

impl FromStr for Entry {
    type Err = EntryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (rest, schedule) = match s.split_once('@') {
            Some((r, sched)) => (r, Some(sched.parse()?)),
            None => (s, None),
        };
        let (kind, k) = match rest.split_once(':') {
            Some((kind, k)) => {
                let k: u32 = k.parse().map_err(|_| EntryError::BadK(s.into()))?;
                (kind.parse()?, Some(k))
            }
            None => (rest.parse()?, None),
        };
        Ok(Entry { kind, k, schedule })
    }
}

impl Entry {
    /// Builds the run configuration, filling unset fields from defaults.
    pub fn to_config(&self, seed: u64, default_schedule: Option<Schedule>, timeout: Option<Duration>) -> RunConfig {
        let mut strategy = StrategyConfig::new(self.kind).with_seed(seed);
        if let Some(k) = self.k {
            strategy = strategy.with_k(k);
        }
        let mut config = RunConfig::new(strategy);
        config.schedule = self.schedule.or(default_schedule).unwrap_or(self.kind.default_schedule());
        config.timeout = timeout;
        config
    }
}

/// Parses a comma-separated list of entries.
pub fn parse_entries(list: &str) -> Result<Vec<Entry>, EntryError> {
    let entries =
        list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<Vec<Entry>, _>>()?;
    if entries.is_empty() {
        return Err(EntryError::Empty);
    }
    Ok(entries)
}

/// Table-style aggregate for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub config: RunConfig,
    pub solved: usize,
    pub sat: usize,
    pub unsat: usize,
    /// Total time on solved instances divided by the number solved.
    pub avg_time: f64,
}

impl Summary {
    pub fn from_reports<'r>(config: RunConfig, reports: impl IntoIterator<Item = &'r RunReport>) -> Summary {
        let (mut sat, mut unsat, mut time) = (0, 0, 0.0);
        for r in reports {
            match r.answer {
                Answer::Sat => sat += 1,
                Answer::Unsat => unsat += 1,
                Answer::Unknown => continue,
            }
            time += r.cpu_time;
        }
        let solved = sat + unsat;
        let avg_time = if solved == 0 { 0.0 } else { time / solved as f64 };
        Summary { config, solved, sat, unsat, avg_time }
    }
}

impl fmt::Display for Summary {
    /// `#Solved (#SAT - #UNSAT)` and average time, as in a results table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let split = format!("({} - {})", self.sat, self.unsat);
        write!(f, "{:<28} {:>7}  {:<15}  {:.3}s", self.config.label(), self.solved, split, self.avg_time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    /// One report per (instance, config), instances in file-name order and
    /// configs in the order given.
    pub reports: Vec<RunReport>,
    pub summaries: Vec<Summary>,
    /// Files skipped because they could not be read or parsed.
    pub skipped: Vec<PathBuf>,
}

/// `.cnf` files directly inside `dir`, sorted by name.
pub fn list_instances(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "cnf"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every configuration on every `.cnf` file of `dir` using up to `jobs`
/// worker threads. Results do not depend on `jobs` or on completion order.
pub fn run_batch(dir: &Path, configs: &[RunConfig], jobs: usize) -> io::Result<BatchResult> {
    let files = list_instances(dir)?;
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for path in files {
        match read_instance(&path) {
            Ok(parsed) => instances.push((instance_name(&path), parsed.instance)),
            Err(e) => {
                log::warn!("skipping: {e}");
                skipped.push(path);
            }
        }
    }
    let tasks: Vec<(usize, &RunConfig)> =
        (0..instances.len()).flat_map(|i| configs.iter().map(move |c| (i, c))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(io::Error::other)?;
    let reports: Vec<RunReport> = pool
        .install(|| {
            tasks
                .par_iter()
                .map(|&(i, config)| {
                    let (name, instance) = &instances[i];
                    run_instance(name, instance, config, None)
                })
                .collect::<Result<Vec<_>, RunError>>()
        })
        .map_err(io::Error::other)?;

    let summaries =
        configs.iter().map(|c| Summary::from_reports(*c, reports.iter().filter(|r| r.config == *c))).collect();
    Ok(BatchResult { reports, summaries, skipped })
}

/// Writes data rows followed by summary rows. The first line is a schema
/// comment; `cpu_time` and `avg_time` are the only nondeterministic columns.
pub fn write_csv<W: Write>(out: W, result: &BatchResult) -> io::Result<()> {
    let mut out = out;
    writeln!(out, "# redsat bench schema v{SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &result.reports {
        let s = &r.stats;
        let c = &r.config;
        w.write_record([
            "run".to_string(),
            r.instance.clone(),
            c.strategy.kind.to_string(),
            k_column(c),
            c.strategy.seed.to_string(),
            c.schedule.to_string(),
            r.answer.to_string(),
            format!("{:.4}", r.cpu_time),
            s.conflicts.to_string(),
            s.decisions.to_string(),
            s.propagations.to_string(),
            s.restarts.to_string(),
            s.reductions.to_string(),
            s.clauses_deleted.to_string(),
            s.peak_learned.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    for m in &result.summaries {
        let c = &m.config;
        let mut row = vec![
            "summary".to_string(),
            String::new(),
            c.strategy.kind.to_string(),
            k_column(c),
            c.strategy.seed.to_string(),
            c.schedule.to_string(),
        ];
        row.extend(std::iter::repeat_n(String::new(), 9));
        row.extend([m.solved.to_string(), m.sat.to_string(), m.unsat.to_string(), format!("{:.4}", m.avg_time)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn k_column(c: &RunConfig) -> String {
    if c.strategy.kind.uses_k() {
        c.strategy.k.to_string()
    } else {
        String::new()
    }
}

/// Plain-text results table, one line per configuration.
pub fn format_table(summaries: &[Summary]) -> String {
    let mut s = format!("{:<28} {:>7}  {:<15}  {}\n", "Solver", "#Solved", "(#SAT - #UNSAT)", "Average Time");
    for m in summaries {
        s.push_str(&m.to_string());
        s.push('\n');
    }
    s
}
