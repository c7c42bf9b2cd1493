use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand};
use redsat::{format_table, parse_entries, run_batch, run_single, write_csv, RunConfig, RunReport};
use redsat_core::{Answer, Schedule, StrategyConfig, StrategyKind};

#[derive(Parser)]
#[command(name = "redsat", version, about = "CDCL solver with pluggable learned-clause reduction strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS file ("-" reads standard input).
    Solve {
        file: PathBuf,
        /// size, rand, fifo, sbr, sized, sizekd, reld, lbd, lbdd, glucose-sizekd, glucose-sbr
        #[arg(long, env = "REDSAT_STRATEGY", default_value = "sbr")]
        strategy: StrategyKind,
        /// Size threshold for sbr, sizekd, glucose-sizekd and glucose-sbr.
        #[arg(long, env = "REDSAT_K")]
        k: Option<u32>,
        #[arg(long, env = "REDSAT_SEED", default_value_t = 91648253)]
        seed: u64,
        /// minisat or glucose; defaults to the strategy's natural schedule.
        #[arg(long, env = "REDSAT_SCHEDULE")]
        schedule: Option<Schedule>,
        /// Wall-clock limit in seconds.
        #[arg(long, env = "REDSAT_TIMEOUT")]
        timeout: Option<f64>,
        /// Check the model against the formula before reporting SAT.
        #[arg(long, env = "REDSAT_VERIFY")]
        verify: bool,
        /// Write a DRAT proof to this file.
        #[arg(long, env = "REDSAT_DRAT")]
        drat: Option<PathBuf>,
        /// Disable learned-clause minimization.
        #[arg(long)]
        no_minimize: bool,
    },
    /// Run a list of configurations over every .cnf file in a directory.
    Bench {
        dir: PathBuf,
        /// Comma-separated entries of the form kind[:k][@schedule].
        #[arg(long, env = "REDSAT_STRATEGIES")]
        strategies: String,
        #[arg(long, env = "REDSAT_TIMEOUT")]
        timeout: f64,
        #[arg(long, env = "REDSAT_OUT")]
        out: PathBuf,
        #[arg(long, env = "REDSAT_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, env = "REDSAT_SEED", default_value_t = 91648253)]
        seed: u64,
        /// Schedule for entries that do not name one.
        #[arg(long, env = "REDSAT_SCHEDULE")]
        schedule: Option<Schedule>,
    },
}

fn timeout(secs: Option<f64>) -> anyhow::Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).context("timeout must be a nonnegative number of seconds")).transpose()
}

fn print_report(r: &RunReport) -> io::Result<()> {
    let mut out = io::stdout().lock();
    let s = &r.stats;
    writeln!(out, "c instance {}", r.instance)?;
    writeln!(out, "c config {}", r.config.label())?;
    writeln!(
        out,
        "c conflicts {} decisions {} propagations {} restarts {}",
        s.conflicts, s.decisions, s.propagations, s.restarts
    )?;
    writeln!(
        out,
        "c reductions {} deleted {} learned {} peak_learned {}",
        s.reductions, s.clauses_deleted, s.learned_clauses, s.peak_learned
    )?;
    writeln!(out, "c time {:.3}s", r.cpu_time)?;
    if let Some(ok) = r.verified {
        writeln!(out, "c model verified: {ok}")?;
    }
    match r.answer {
        Answer::Sat => writeln!(out, "s SATISFIABLE")?,
        Answer::Unsat => writeln!(out, "s UNSATISFIABLE")?,
        Answer::Unknown => writeln!(out, "s UNKNOWN")?,
    }
    if let Some(model) = &r.model {
        let mut line = String::from("v");
        for (i, &val) in model.iter().enumerate() {
            let v = i as i64 + 1;
            line.push_str(&format!(" {}", if val { v } else { -v }));
        }
        writeln!(out, "{line} 0")?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve { file, strategy, k, seed, schedule, timeout: secs, verify, drat, no_minimize } => {
            let mut sc = StrategyConfig::new(strategy).with_seed(seed);
            if let Some(k) = k {
                sc = sc.with_k(k);
            }
            let mut config = RunConfig::new(sc);
            if let Some(s) = schedule {
                config.schedule = s;
            }
            config.timeout = timeout(secs)?;
            config.verify = verify;
            config.minimize = !no_minimize;
            let report = run_single(&file, &config, drat.as_deref())?;
            print_report(&report)?;
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::Bench { dir, strategies, timeout: secs, out, jobs, seed, schedule } => {
            let limit = timeout(Some(secs))?;
            let configs: Vec<RunConfig> =
                parse_entries(&strategies)?.iter().map(|e| e.to_config(seed, schedule, limit)).collect();
            let result = run_batch(&dir, &configs, jobs).with_context(|| format!("benchmarking {}", dir.display()))?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(BufWriter::new(file), &result).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", format_table(&result.summaries));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
