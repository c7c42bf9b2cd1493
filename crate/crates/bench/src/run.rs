//! Solving one instance under one configuration.

use std::fs::File;
use std::io::{self, BufWriter, Read};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use redsat_core::solver::SolverError;
use redsat_core::{
    check_model, parse_dimacs, Answer, DbConfig, DimacsError, Instance, Parsed, ProofSink, Schedule, Solver,
    SolverConfig, Stats, StrategyConfig,
};
use thiserror::Error;

use crate::drat::DratWriter;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: DimacsError },
    #[error(transparent)]
    Config(#[from] SolverError),
    #[error("cannot write proof {path}: {source}")]
    Proof { path: PathBuf, source: io::Error },
    #[error("model returned for {0} does not satisfy the formula")]
    BadModel(String),
}

/// Everything that selects one solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub strategy: StrategyConfig,
    pub schedule: Schedule,
    pub timeout: Option<Duration>,
    pub verify: bool,
    pub minimize: bool,
}

impl RunConfig {
    pub fn new(strategy: StrategyConfig) -> RunConfig {
        RunConfig { strategy, schedule: strategy.kind.default_schedule(), timeout: None, verify: false, minimize: true }
    }

    /// `sbr(12)-minisat` style label used in reports.
    pub fn label(&self) -> String {
        format!("{}-{}", self.strategy.label(), self.schedule)
    }

    fn solver_config(&self) -> SolverConfig {
        let mut config = SolverConfig::new(self.strategy, DbConfig::with_schedule(self.schedule));
        config.minimize = self.minimize;
        config
    }
}

/// Outcome and counters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub config: RunConfig,
    pub answer: Answer,
    /// Wall-clock seconds spent in the solver.
    pub cpu_time: f64,
    pub stats: Stats,
    /// `Some` when the model was checked.
    pub verified: Option<bool>,
    pub model: Option<Vec<bool>>,
}

impl RunReport {
    /// SAT-competition exit status: 10 SAT, 20 UNSAT, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.answer {
            Answer::Sat => 10,
            Answer::Unsat => 20,
            Answer::Unknown => 0,
        }
    }
}

/// Reads DIMACS from `path`, or from standard input when `path` is `-`.
pub fn read_instance(path: &Path) -> Result<Parsed, RunError> {
    let read_err = |source| RunError::Read { path: path.to_owned(), source };
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(read_err)?;
    } else {
        File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(read_err)?;
    }
    let parsed = parse_dimacs(&text).map_err(|source| RunError::Parse { path: path.to_owned(), source })?;
    for w in &parsed.warnings {
        log::warn!("{}: {:?}", path.display(), w);
    }
    Ok(parsed)
}

/// Solves an in-memory instance, streaming the proof to `proof` if given.
pub fn run_instance(
    name: &str,
    instance: &Instance,
    config: &RunConfig,
    proof: Option<&mut dyn ProofSink>,
) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let deadline = config.timeout.map(|t| start + t);
    let mut past_deadline = || deadline.is_some_and(|d| Instant::now() >= d);
    let mut solver = Solver::new(instance, config.solver_config())?;
    solver.set_terminate(&mut past_deadline);
    if let Some(p) = proof {
        solver.set_proof(p);
    }
    let result = solver.solve();
    let cpu_time = start.elapsed().as_secs_f64();
    drop(solver);

    let verified = match (&result.model, config.verify) {
        (Some(model), true) => Some(check_model(instance, model).expect("solver models are complete")),
        _ => None,
    };
    Ok(RunReport {
        instance: name.to_owned(),
        config: *config,
        answer: result.answer,
        cpu_time,
        stats: result.stats,
        verified,
        model: result.model,
    })
}

/// Parses and solves the file at `path`. With `drat`, the proof goes to that
/// file. A model that fails verification is an error.
pub fn run_single(path: &Path, config: &RunConfig, drat: Option<&Path>) -> Result<RunReport, RunError> {
    let parsed = read_instance(path)?;
    let name = instance_name(path);
    let report = match drat {
        Some(proof_path) => {
            let proof_err = |source| RunError::Proof { path: proof_path.to_owned(), source };
            let file = File::create(proof_path).map_err(proof_err)?;
            let mut writer = DratWriter::new(BufWriter::new(file));
            let report = run_instance(&name, &parsed.instance, config, Some(&mut writer))?;
            writer.finish().map_err(proof_err)?;
            report
        }
        None => run_instance(&name, &parsed.instance, config, None)?,
    };
    if report.verified == Some(false) {
        return Err(RunError::BadModel(name));
    }
    Ok(report)
}

pub fn instance_name(path: &Path) -> String {
    if path.as_os_str() == "-" {
        return "<stdin>".into();
    }
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}
