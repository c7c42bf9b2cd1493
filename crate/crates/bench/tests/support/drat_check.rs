//! Forward DRAT checker used by the tests. It parses the formula and the
//! proof from text and shares no code with the solver.
#![allow(dead_code)]

use std::collections::HashMap;

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Checked {
    pub lemmas: usize,
    pub deletions: usize,
}

struct Db {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    active: Vec<bool>,
    occ: HashMap<i32, Vec<usize>>,
    by_key: HashMap<Vec<i32>, Vec<usize>>,
}

fn key(lits: &[i32]) -> Vec<i32> {
    let mut k = lits.to_vec();
    k.sort_unstable();
    k.dedup();
    k
}

impl Db {
    fn add(&mut self, lits: Vec<i32>) {
        let id = self.clauses.len();
        for &l in &lits {
            self.num_vars = self.num_vars.max(l.unsigned_abs() as usize);
            self.occ.entry(l).or_default().push(id);
        }
        self.by_key.entry(key(&lits)).or_default().push(id);
        self.clauses.push(lits);
        self.active.push(true);
    }

    fn delete(&mut self, lits: &[i32]) -> bool {
        match self.by_key.get_mut(&key(lits)).and_then(|ids| ids.pop()) {
            Some(id) => {
                self.active[id] = false;
                true
            }
            None => false,
        }
    }

    /// True if asserting the negation of `lits` and unit propagating over
    /// the active clauses yields a conflict.
    fn rup(&self, lits: &[i32]) -> bool {
        let mut value = vec![0i8; self.num_vars + 1];
        let mut queue: Vec<i32> = Vec::new();
        // `assign(l)` makes `l` true; false on contradiction.
        let assign = |l: i32, value: &mut Vec<i8>, queue: &mut Vec<i32>| -> bool {
            let v = l.unsigned_abs() as usize;
            let want = if l > 0 { 1 } else { -1 };
            match value[v] {
                0 => {
                    value[v] = want;
                    queue.push(-l);
                    true
                }
                x => x == want,
            }
        };
        for &l in lits {
            if !assign(-l, &mut value, &mut queue) {
                return true;
            }
        }
        for (id, c) in self.clauses.iter().enumerate() {
            if !self.active[id] {
                continue;
            }
            match c.len() {
                0 => return true,
                1 if !assign(c[0], &mut value, &mut queue) => return true,
                _ => {}
            }
        }
        let lit_value = |l: i32, value: &[i8]| {
            let x = value[l.unsigned_abs() as usize];
            if l > 0 {
                x
            } else {
                -x
            }
        };
        let mut head = 0;
        while head < queue.len() {
            let falsified = queue[head];
            head += 1;
            let Some(ids) = self.occ.get(&falsified) else { continue };
            for &id in ids {
                if !self.active[id] {
                    continue;
                }
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in &self.clauses[id] {
                    match lit_value(l, &value) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            if unassigned != Some(l) {
                                open += 1;
                            }
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unassigned) {
                    (0, _) => return true,
                    (1, Some(l)) => {
                        assign(l, &mut value, &mut queue);
                    }
                    _ => {}
                }
            }
        }
        false
    }

    /// Resolution asymmetric tautology on the first literal.
    fn rat(&self, lits: &[i32]) -> bool {
        let Some(&pivot) = lits.first() else { return false };
        let Some(ids) = self.occ.get(&-pivot) else { return true };
        ids.iter().filter(|&&id| self.active[id]).all(|&id| {
            let mut resolvent = lits.to_vec();
            resolvent.extend(self.clauses[id].iter().copied().filter(|&l| l != -pivot));
            resolvent.iter().any(|&l| resolvent.contains(&-l)) || self.rup(&resolvent)
        })
    }
}

fn parse_lits(line: &str, n: usize) -> Result<Vec<i32>, String> {
    let mut lits = Vec::new();
    for tok in line.split_whitespace() {
        let l: i32 = tok.parse().map_err(|_| format!("line {n}: bad token `{tok}`"))?;
        if l == 0 {
            return Ok(lits);
        }
        lits.push(l);
    }
    Err(format!("line {n}: missing terminating 0"))
}

/// Checks `proof` against the CNF text `cnf`. Succeeds only if every lemma is
/// RUP or RAT, every deletion names a live clause, and the empty clause is
/// derived.
pub fn check(cnf: &str, proof: &str) -> Result<Checked, String> {
    let mut db =
        Db { num_vars: 0, clauses: Vec::new(), active: Vec::new(), occ: HashMap::new(), by_key: HashMap::new() };
    let mut pending = Vec::new();
    for tok in cnf.lines().filter(|l| !l.starts_with('c') && !l.starts_with('p')).flat_map(str::split_whitespace) {
        let l: i32 = tok.parse().map_err(|_| format!("cnf: bad token `{tok}`"))?;
        if l == 0 {
            db.add(std::mem::take(&mut pending));
        } else {
            pending.push(l);
        }
    }
    if let Some(p) = cnf.lines().find(|l| l.starts_with("p cnf")) {
        let n: usize = p.split_whitespace().nth(2).and_then(|t| t.parse().ok()).ok_or("cnf: bad header")?;
        db.num_vars = db.num_vars.max(n);
    }

    let mut checked = Checked::default();
    for (i, line) in proof.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("d ") {
            let lits = parse_lits(rest, n)?;
            if !db.delete(&lits) {
                return Err(format!("line {n}: deletion of absent clause {lits:?}"));
            }
            checked.deletions += 1;
            continue;
        }
        let lits = parse_lits(line, n)?;
        for &l in &lits {
            db.num_vars = db.num_vars.max(l.unsigned_abs() as usize);
        }
        if !db.rup(&lits) && !db.rat(&lits) {
            return Err(format!("line {n}: lemma {lits:?} is neither RUP nor RAT"));
        }
        checked.lemmas += 1;
        if lits.is_empty() {
            return Ok(checked);
        }
        db.add(lits);
    }
    Err("proof ends without the empty clause".into())
}
