//! File formats, timing, and batch orchestration around `redsat-core`.

pub mod batch;
pub mod drat;
pub mod run;

pub use batch::{format_table, parse_entries, run_batch, write_csv, BatchResult, Entry, Summary};
pub use drat::DratWriter;
pub use run::{read_instance, run_instance, run_single, RunConfig, RunError, RunReport};
