//! DRAT proof output.

use std::fmt::Write as _;
use std::io::{self, Write};

use redsat_core::{Lit, ProofSink};

/// Writes DRAT text: one clause per line, literals separated by spaces and
/// terminated by `0`; deletions carry a `d ` prefix.
///
/// The first IO error is latched and further output is dropped; call
/// [`DratWriter::finish`] to surface it.
pub struct DratWriter<W: Write> {
    out: W,
    error: Option<io::Error>,
    line: String,
}

impl<W: Write> DratWriter<W> {
    pub fn new(out: W) -> DratWriter<W> {
        DratWriter { out, error: None, line: String::new() }
    }

    fn emit(&mut self, prefix: &str, lits: &[Lit]) {
        if self.error.is_some() {
            return;
        }
        self.line.clear();
        self.line.push_str(prefix);
        for l in lits {
            let _ = write!(self.line, "{l} ");
        }
        self.line.push_str("0\n");
        if let Err(e) = self.out.write_all(self.line.as_bytes()) {
            self.error = Some(e);
        }
    }

    /// Flushes and returns the sink, or the first error met while writing.
    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> ProofSink for DratWriter<W> {
    fn add(&mut self, lits: &[Lit]) {
        self.emit("", lits);
    }

    fn delete(&mut self, lits: &[Lit]) {
        self.emit("d ", lits);
    }
}
