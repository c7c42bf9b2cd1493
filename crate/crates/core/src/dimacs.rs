//! DIMACS CNF parsing and clause normalization.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use crate::lit::Lit;

/// A normalized clause: no repeated literal, no complementary pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn into_lits(self) -> Vec<Lit> {
        self.lits
    }
}

/// Result of [`normalize_clause`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Clause(Clause),
    /// The input contained both `x` and `-x`.
    Tautology,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: missing or malformed `p cnf <vars> <clauses>` header")]
    BadHeader { line: usize },
    #[error("line {line}: clause data before the `p cnf` header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: duplicate `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: literal {literal} is outside the declared {num_vars} variables")]
    LiteralOutOfRange { line: usize, literal: i64, num_vars: usize },
    #[error("line {line}: `{token}` is not an integer")]
    BadToken { line: usize, token: String },
    #[error("final clause is not terminated by 0")]
    UnterminatedClause,
    #[error("cannot normalize an empty literal sequence")]
    EmptyClause,
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
    /// Set when the input contained the empty clause, which is kept out of
    /// `clauses` since it is an immediate refutation.
    pub has_empty_clause: bool,
}

impl Instance {
    pub fn new(num_vars: usize) -> Instance {
        Instance { num_vars, clauses: Vec::new(), has_empty_clause: false }
    }

    /// Normalizes and appends a clause given as DIMACS integers. Returns
    /// `false` when the clause was a tautology and got dropped.
    ///
    /// Panics if a literal is zero or outside `num_vars`.
    pub fn add_clause(&mut self, dimacs: &[i32]) -> bool {
        if dimacs.is_empty() {
            self.has_empty_clause = true;
            return true;
        }
        let lits: Vec<Lit> = dimacs
            .iter()
            .map(|&v| {
                assert!(v.unsigned_abs() as usize <= self.num_vars, "literal {v} out of range");
                Lit::from_dimacs(v)
            })
            .collect();
        match normalize_clause(&lits) {
            Ok(Normalized::Clause(c)) => {
                self.clauses.push(c);
                true
            }
            Ok(Normalized::Tautology) => false,
            Err(_) => unreachable!("checked nonempty above"),
        }
    }

    /// Serializes to DIMACS CNF text. Parsing the output gives back an equal
    /// instance.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let count = self.clauses.len() + self.has_empty_clause as usize;
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, count);
        for c in &self.clauses {
            for l in c.lits() {
                let _ = write!(out, "{} ", l.to_dimacs());
            }
            out.push_str("0\n");
        }
        if self.has_empty_clause {
            out.push_str("0\n");
        }
        out
    }
}

/// Non-fatal findings while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimacsWarning {
    ClauseCountMismatch { declared: usize, found: usize },
}

/// Parser output: the instance plus bookkeeping about what was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub instance: Instance,
    pub tautologies_dropped: usize,
    pub warnings: Vec<DimacsWarning>,
}

/// Removes repeated literals (keeping first occurrences) and detects
/// tautologies.
pub fn normalize_clause(lits: &[Lit]) -> Result<Normalized, DimacsError> {
    if lits.is_empty() {
        return Err(DimacsError::EmptyClause);
    }
    let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
    for &l in lits {
        // Clauses are short; a linear scan beats hashing here.
        if out.contains(&!l) {
            return Ok(Normalized::Tautology);
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Ok(Normalized::Clause(Clause { lits: out }))
}

/// Parses a DIMACS CNF document.
///
/// Comment lines start with `c`. A `%` line (as found at the end of SATLIB
/// files) ends the clause section. Clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<Parsed, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut instance = Instance::default();
    let mut tautologies_dropped = 0;
    let mut found = 0;
    let mut pending: Vec<Lit> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            let h = parse_header(line).ok_or(DimacsError::BadHeader { line: line_no })?;
            instance.num_vars = h.0;
            header = Some(h);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::ClauseBeforeHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken { line: line_no, token: token.into() })?;
            if value == 0 {
                found += 1;
                if pending.is_empty() {
                    instance.has_empty_clause = true;
                    continue;
                }
                match normalize_clause(&pending)? {
                    Normalized::Clause(c) => instance.clauses.push(c),
                    Normalized::Tautology => tautologies_dropped += 1,
                }
                pending.clear();
            } else {
                if value.unsigned_abs() > num_vars as u64 {
                    return Err(DimacsError::LiteralOutOfRange { line: line_no, literal: value, num_vars });
                }
                pending.push(Lit::from_dimacs(value as i32));
            }
        }
    }

    let Some((_, declared)) = header else {
        return Err(DimacsError::BadHeader { line: text.lines().count().max(1) });
    };
    if !pending.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    let mut warnings = Vec::new();
    if declared != found {
        warnings.push(DimacsWarning::ClauseCountMismatch { declared, found });
    }
    Ok(Parsed { instance, tautologies_dropped, warnings })
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    if it.next()? != "p" || it.next()? != "cnf" {
        return None;
    }
    let vars: usize = it.next()?.parse().ok()?;
    let clauses: usize = it.next()?.parse().ok()?;
    if it.next().is_some() || vars > i32::MAX as usize {
        return None;
    }
    Some((vars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    fn dimacs_of(c: &Clause) -> Vec<i32> {
        c.lits().iter().map(|l| l.to_dimacs()).collect()
    }

    #[test]
    fn parses_basic_document() {
        let p = parse_dimacs("p cnf 3 2\n1 -3 0\n2 3 -1 0\n").unwrap();
        assert_eq!(p.instance.num_vars, 3);
        let cs: Vec<_> = p.instance.clauses.iter().map(dimacs_of).collect();
        assert_eq!(cs, vec![vec![1, -3], vec![2, 3, -1]]);
        assert!(p.warnings.is_empty());
        assert!(!p.instance.has_empty_clause);
    }

    #[test]
    fn skips_comments() {
        let p = parse_dimacs("c hi\np cnf 1 1\n1 0\n").unwrap();
        assert_eq!(p.instance.num_vars, 1);
        assert_eq!(p.instance.clauses.len(), 1);
        assert_eq!(dimacs_of(&p.instance.clauses[0]), vec![1]);
    }

    #[test]
    fn rejects_out_of_range_literal() {
        let e = parse_dimacs("p cnf 2 1\n3 0\n").unwrap_err();
        assert!(matches!(e, DimacsError::LiteralOutOfRange { literal: 3, num_vars: 2, .. }));
        let e = parse_dimacs("p cnf 2 1\n-3 0\n").unwrap_err();
        assert!(matches!(e, DimacsError::LiteralOutOfRange { literal: -3, .. }));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(DimacsError::ClauseBeforeHeader { line: 1 })));
        assert!(matches!(parse_dimacs("p cnf x 2\n"), Err(DimacsError::BadHeader { line: 1 })));
        assert!(matches!(parse_dimacs("p dnf 2 2\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse_dimacs("c only\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse_dimacs(""), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\np cnf 1 1\n"), Err(DimacsError::DuplicateHeader { line: 2 })));
    }

    #[test]
    fn rejects_bad_token_and_unterminated() {
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 x 0\n"), Err(DimacsError::BadToken { line: 2, .. })));
        assert_eq!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(DimacsError::UnterminatedClause));
    }

    #[test]
    fn clauses_span_lines_and_share_lines() {
        let p = parse_dimacs("p cnf 4 3\n1 2\n -3 0 4 0 -1\n-2 0\n").unwrap();
        let cs: Vec<_> = p.instance.clauses.iter().map(dimacs_of).collect();
        assert_eq!(cs, vec![vec![1, 2, -3], vec![4], vec![-1, -2]]);
    }

    #[test]
    fn count_mismatch_is_a_warning() {
        let p = parse_dimacs("p cnf 2 5\n1 0\n").unwrap();
        assert_eq!(p.warnings, vec![DimacsWarning::ClauseCountMismatch { declared: 5, found: 1 }]);
    }

    #[test]
    fn tautologies_dropped_duplicates_kept() {
        let p = parse_dimacs("p cnf 2 4\n1 -1 0\n1 2 0\n1 2 0\n2 2 0\n").unwrap();
        assert_eq!(p.tautologies_dropped, 1);
        let cs: Vec<_> = p.instance.clauses.iter().map(dimacs_of).collect();
        assert_eq!(cs, vec![vec![1, 2], vec![1, 2], vec![2]]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn zero_clauses_and_unused_vars() {
        let p = parse_dimacs("p cnf 7 0\n").unwrap();
        assert_eq!(p.instance.num_vars, 7);
        assert!(p.instance.clauses.is_empty());
    }

    #[test]
    fn empty_clause_is_flagged() {
        let p = parse_dimacs("p cnf 1 2\n1 0\n0\n").unwrap();
        assert!(p.instance.has_empty_clause);
        assert_eq!(p.instance.clauses.len(), 1);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn satlib_trailer_ends_input() {
        let p = parse_dimacs("p cnf 2 1\n1 -2 0\n%\n0\n\n").unwrap();
        assert_eq!(p.instance.clauses.len(), 1);
        assert!(!p.instance.has_empty_clause);
    }

    #[test]
    fn normalize_examples() {
        let Normalized::Clause(c) = normalize_clause(&lits(&[1, 1, -2])).unwrap() else { panic!() };
        assert_eq!(dimacs_of(&c), vec![1, -2]);
        assert_eq!(normalize_clause(&lits(&[1, -1, 2])).unwrap(), Normalized::Tautology);
        let Normalized::Clause(c) = normalize_clause(&lits(&[5])).unwrap() else { panic!() };
        assert_eq!(dimacs_of(&c), vec![5]);
        assert_eq!(normalize_clause(&[]), Err(DimacsError::EmptyClause));
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..12).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            (Just(n), prop::collection::vec(prop::collection::vec(lit, 0..6), 0..20)).prop_map(|(n, cs)| {
                let mut inst = Instance::new(n);
                for c in cs {
                    inst.add_clause(&c);
                }
                inst
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(inst in arb_instance()) {
            let parsed = parse_dimacs(&inst.to_dimacs()).unwrap();
            prop_assert_eq!(&parsed.instance, &inst);
            prop_assert!(parsed.warnings.is_empty());
            prop_assert_eq!(parsed.tautologies_dropped, 0);
        }

        #[test]
        fn stored_clauses_are_normal(inst in arb_instance()) {
            for c in &inst.clauses {
                prop_assert!(!c.is_empty());
                for (i, a) in c.lits().iter().enumerate() {
                    prop_assert!(a.var().index() < inst.num_vars);
                    for b in &c.lits()[i + 1..] {
                        prop_assert!(a.var() != b.var());
                    }
                }
            }
        }
    }
}
