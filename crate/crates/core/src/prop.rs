//! Unit propagation with two watched literals, a small DPLL search on top
//! of it, and brute-force ground truth used to judge encodings.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cnf::{ClauseSink, Lit, Var};
use crate::model::{amo_holds, PbConstraint};

fn code(l: Lit) -> usize {
    (l.var().index() as usize) << 1 | usize::from(l.is_neg())
}

/// Clause database with an assignment trail and decision levels.
#[derive(Clone)]
pub struct Propagator {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    levels: Vec<usize>,
    head: usize,
    root_conflict: bool,
}

impl Propagator {
    pub fn new(num_vars: u32, sink: &ClauseSink) -> Propagator {
        let n = num_vars.max(sink.max_var()) as usize + 1;
        let mut p = Propagator {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![0; n],
            trail: Vec::new(),
            levels: Vec::new(),
            head: 0,
            root_conflict: sink.is_unsat(),
        };
        for c in sink.clauses() {
            p.add_clause(c.clone());
        }
        if !p.root_conflict && !p.propagate() {
            p.root_conflict = true;
        }
        p
    }

    fn add_clause(&mut self, c: Vec<Lit>) {
        match c.len() {
            0 => self.root_conflict = true,
            1 => {
                if !self.enqueue(c[0]) {
                    self.root_conflict = true;
                }
            }
            _ => {
                let id = self.clauses.len();
                self.watches[code(c[0])].push(id);
                self.watches[code(c[1])].push(id);
                self.clauses.push(c);
            }
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.value.len() as u32 - 1
    }

    pub fn value(&self, l: Lit) -> Option<bool> {
        match self.value[l.var().index() as usize] {
            0 => None,
            v => Some((v > 0) != l.is_neg()),
        }
    }

    pub fn var_value(&self, v: Var) -> Option<bool> {
        self.value(v.pos())
    }

    /// Whether the clause set is already refuted without decisions.
    pub fn root_conflict(&self) -> bool {
        self.root_conflict
    }

    fn enqueue(&mut self, l: Lit) -> bool {
        match self.value(l) {
            Some(b) => b,
            None => {
                self.value[l.var().index() as usize] = if l.is_neg() { -1 } else { 1 };
                self.trail.push(l);
                true
            }
        }
    }

    /// Open a new decision level and assert `l` there. Returns false if `l`
    /// is already false.
    pub fn decide(&mut self, l: Lit) -> bool {
        self.levels.push(self.trail.len());
        self.enqueue(l)
    }

    /// Assert `l` at the current level.
    pub fn assume(&mut self, l: Lit) -> bool {
        self.enqueue(l)
    }

    pub fn new_level(&mut self) {
        self.levels.push(self.trail.len());
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    /// Undo everything above `level`.
    pub fn backtrack(&mut self, level: usize) {
        if self.levels.len() <= level {
            return;
        }
        let keep = self.levels[level];
        for l in self.trail.drain(keep..) {
            self.value[l.var().index() as usize] = 0;
        }
        self.levels.truncate(level);
        self.head = self.head.min(keep);
    }

    /// Run unit propagation to fixpoint. Returns false on conflict.
    pub fn propagate(&mut self) -> bool {
        if self.root_conflict {
            return false;
        }
        while self.head < self.trail.len() {
            let p = self.trail[self.head];
            self.head += 1;
            let false_lit = !p;
            let fc = code(false_lit);
            let ws = std::mem::take(&mut self.watches[fc]);
            let mut keep: Vec<usize> = Vec::with_capacity(ws.len());
            let mut conflict = false;
            let mut i = 0;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                if conflict {
                    keep.push(cid);
                    continue;
                }
                let c = &mut self.clauses[cid];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value_of(first) == Some(true) {
                    keep.push(cid);
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cid].len() {
                    let l = self.clauses[cid][k];
                    if self.value_of(l) != Some(false) {
                        self.clauses[cid].swap(1, k);
                        self.watches[code(l)].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(cid);
                if !self.enqueue(first) {
                    conflict = true;
                }
            }
            self.watches[fc] = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    fn value_of(&self, l: Lit) -> Option<bool> {
        self.value(l)
    }

    /// Chronological DPLL from the current state, deciding the lowest
    /// unassigned variable, false first. On success the assignment stays in
    /// place above the starting level; on failure it is undone.
    pub fn search(&mut self) -> bool {
        self.search_bounded(usize::MAX).expect("unbounded search")
    }

    /// Like [`Propagator::search`], giving up with `None` (state undone)
    /// after `max_conflicts` conflicts.
    pub fn search_bounded(&mut self, max_conflicts: usize) -> Option<bool> {
        let base = self.level();
        let mut decisions: Vec<(Var, bool)> = Vec::new();
        let mut cursor = 1usize;
        let mut conflicts = 0usize;
        loop {
            if self.propagate() {
                while cursor < self.value.len() && self.value[cursor] != 0 {
                    cursor += 1;
                }
                if cursor == self.value.len() {
                    return Some(true);
                }
                let v = Var::new(cursor as u32);
                decisions.push((v, false));
                self.decide(v.neg());
                continue;
            }
            conflicts += 1;
            if conflicts > max_conflicts {
                self.backtrack(base);
                return None;
            }
            loop {
                let Some((v, flipped)) = decisions.pop() else {
                    self.backtrack(base);
                    return Some(false);
                };
                self.backtrack(base + decisions.len());
                cursor = cursor.min(v.index() as usize);
                if !flipped {
                    decisions.push((v, true));
                    self.decide(v.pos());
                    break;
                }
            }
        }
    }

    /// Satisfiability under extra assumptions; leaves the state as found.
    pub fn satisfiable_with(&mut self, assumptions: &[Lit]) -> bool {
        let base = self.level();
        self.new_level();
        let ok = assumptions.iter().all(|&l| self.assume(l)) && self.search();
        self.backtrack(base);
        ok
    }

    /// Full model if satisfiable.
    pub fn solve(&mut self) -> Option<Vec<bool>> {
        let base = self.level();
        self.new_level();
        let out = if self.search() {
            Some((0..self.value.len()).map(|i| self.value[i] > 0).collect())
        } else {
            None
        };
        self.backtrack(base);
        out
    }
}

/// Apply the unit clauses by propagation and return the simplified clause
/// set (satisfied clauses and false literals removed).
pub fn simplify_units(sink: &ClauseSink) -> ClauseSink {
    let mut p = Propagator::new(sink.max_var(), sink);
    let mut out = ClauseSink::new();
    if p.root_conflict() {
        out.add_empty();
        return out;
    }
    for c in sink.clauses() {
        if c.iter().any(|&l| p.value(l) == Some(true)) {
            continue;
        }
        out.add(c.iter().copied().filter(|&l| p.value(l).is_none()));
    }
    let _ = p.propagate();
    out
}

/// Ground truth for a raw constraint with AMO (and optional ALO) groups
/// over a small set of variables.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub vars: Vec<Var>,
    pub constraints: Vec<PbConstraint>,
    pub amo: Vec<Vec<Var>>,
    pub alo: Vec<Vec<Var>>,
}

/// A partial assignment over the oracle's variables.
pub type Partial = Vec<Option<bool>>;

impl Oracle {
    pub fn new(vars: Vec<Var>, constraints: Vec<PbConstraint>, amo: Vec<Vec<Var>>) -> Oracle {
        Oracle { vars, constraints, amo, alo: Vec::new() }
    }

    fn pos(&self, v: Var) -> usize {
        self.vars.iter().position(|&u| u == v).expect("variable known to the oracle")
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        let val = |v: Var| assignment[self.pos(v)];
        self.constraints.iter().all(|c| c.holds(val))
            && amo_holds(&self.amo, val)
            && self.alo.iter().all(|g| g.iter().any(|&v| val(v)))
    }

    pub fn holds_mask(&self, mask: u64) -> bool {
        let a: Vec<bool> = (0..self.vars.len()).map(|i| mask >> i & 1 == 1).collect();
        self.holds(&a)
    }

    /// Does some completion of `partial` satisfy everything?
    pub fn extendible(&self, partial: &Partial) -> bool {
        let free: Vec<usize> = (0..self.vars.len()).filter(|&i| partial[i].is_none()).collect();
        let mut a: Vec<bool> = partial.iter().map(|v| v.unwrap_or(false)).collect();
        for m in 0u64..1 << free.len() {
            for (b, &i) in free.iter().enumerate() {
                a[i] = m >> b & 1 == 1;
            }
            if self.holds(&a) {
                return true;
            }
        }
        false
    }

    /// Literals over unassigned variables implied by `partial`.
    pub fn forced(&self, partial: &Partial) -> Vec<Lit> {
        let mut out = Vec::new();
        let mut p = partial.clone();
        for i in 0..self.vars.len() {
            if partial[i].is_some() {
                continue;
            }
            for b in [true, false] {
                p[i] = Some(b);
                if !self.extendible(&p) {
                    let v = self.vars[i];
                    out.push(if b { v.neg() } else { v.pos() });
                }
            }
            p[i] = None;
        }
        out
    }

    pub fn lits(&self, partial: &Partial) -> Vec<Lit> {
        partial
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| if b { self.vars[i].pos() } else { self.vars[i].neg() }))
            .collect()
    }

    /// A random partial assignment: some groups get one true member, some
    /// get all members false, the rest stay open.
    pub fn sample_partial<R: Rng>(&self, rng: &mut R) -> Partial {
        let mut p: Partial = vec![None; self.vars.len()];
        let mut groups: Vec<Vec<Var>> = self.amo.clone();
        for &v in &self.vars {
            if !groups.iter().any(|g| g.contains(&v)) {
                groups.push(vec![v]);
            }
        }
        groups.shuffle(rng);
        let take = rng.gen_range(0..=groups.len());
        for g in groups.iter().take(take) {
            if rng.gen_bool(0.5) {
                let v = *g.choose(rng).expect("non-empty group");
                p[self.pos(v)] = Some(true);
            } else {
                for &v in g {
                    p[self.pos(v)] = Some(false);
                }
            }
        }
        p
    }
}

/// Outcome of a check.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(what);
        }
    }

    pub fn merge(&mut self, other: &Report) {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure.clone_from(&other.first_failure);
        }
    }
}

/// Every total assignment of the oracle's variables satisfies the
/// constraints iff it extends to a model of the clauses.
pub fn check_models(oracle: &Oracle, cnf: &ClauseSink, num_vars: u32) -> Report {
    let mut p = crate::sat::Checker::new(num_vars, cnf);
    let mut r = Report::default();
    let n = oracle.vars.len();
    assert!(n <= 20, "brute force over {n} variables");
    for m in 0u64..1 << n {
        let lits: Vec<Lit> = (0..n)
            .map(|i| if m >> i & 1 == 1 { oracle.vars[i].pos() } else { oracle.vars[i].neg() })
            .collect();
        let want = oracle.holds_mask(m);
        let got = p.satisfiable_with(&lits);
        r.cases += 1;
        if want != got {
            r.fail(format!("assignment {m:0n$b}: constraint {want}, clauses {got}"));
        }
    }
    r
}

/// Unit propagation under `partial` finds every literal the oracle says is
/// implied (and no conflict).
pub fn check_gac_case(oracle: &Oracle, p: &mut Propagator, partial: &Partial, forced: &[Lit]) -> Result<(), String> {
    let base = p.level();
    p.new_level();
    let ok = oracle.lits(partial).iter().all(|&l| p.assume(l)) && p.propagate();
    let res = if !ok {
        Err(format!("conflict on extendible {:?}", oracle.lits(partial)))
    } else {
        match forced.iter().find(|&&l| p.value(l) != Some(true)) {
            Some(l) => Err(format!("{:?} misses implied {}", oracle.lits(partial), l.dimacs())),
            None => Ok(()),
        }
    };
    p.backtrack(base);
    res
}

/// Unit propagation under a non-extendible `partial` ends in conflict.
pub fn check_cc_case(oracle: &Oracle, p: &mut Propagator, partial: &Partial) -> Result<(), String> {
    let base = p.level();
    p.new_level();
    let conflict = !(oracle.lits(partial).iter().all(|&l| p.assume(l)) && p.propagate());
    p.backtrack(base);
    if conflict {
        Ok(())
    } else {
        Err(format!("no conflict on {:?}", oracle.lits(partial)))
    }
}

/// Sample extendible partial assignments and compare propagation with the
/// oracle's implied literals.
pub fn check_gac<R: Rng>(oracle: &Oracle, cnf: &ClauseSink, num_vars: u32, samples: usize, rng: &mut R) -> Report {
    let mut p = Propagator::new(num_vars, cnf);
    let mut r = Report::default();
    let mut tries = 0;
    while r.cases < samples && tries < samples * 20 {
        tries += 1;
        let partial = oracle.sample_partial(rng);
        if !oracle.extendible(&partial) {
            continue;
        }
        let forced = oracle.forced(&partial);
        r.cases += 1;
        if let Err(e) = check_gac_case(oracle, &mut p, &partial, &forced) {
            r.fail(e);
        }
    }
    r
}

/// Sample non-extendible partial assignments and require a conflict.
pub fn check_cc<R: Rng>(oracle: &Oracle, cnf: &ClauseSink, num_vars: u32, samples: usize, rng: &mut R) -> Report {
    let mut p = Propagator::new(num_vars, cnf);
    let mut r = Report::default();
    let mut tries = 0;
    while r.cases < samples && tries < samples * 50 {
        tries += 1;
        let partial = oracle.sample_partial(rng);
        if oracle.extendible(&partial) {
            continue;
        }
        r.cases += 1;
        if let Err(e) = check_cc_case(oracle, &mut p, &partial) {
            r.fail(e);
        }
    }
    r
}
