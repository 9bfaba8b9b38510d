//! Variables, literals, constant folding and DIMACS output.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::Not;

/// A propositional variable, numbered from 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Var {
        assert!(index > 0, "variables are numbered from 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal in DIMACS convention: the sign carries the polarity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(v: i32) -> Lit {
        assert!(v != 0);
        Lit(v)
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_neg(self) -> bool {
        self.0 < 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl From<Var> for Lit {
    fn from(v: Var) -> Lit {
        v.pos()
    }
}

/// A literal or a Boolean constant. Encoders build clauses from these and
/// let the sink fold the constants away.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    True,
    False,
    Lit(Lit),
}

impl Atom {
    pub fn constant(b: bool) -> Atom {
        if b {
            Atom::True
        } else {
            Atom::False
        }
    }

    pub fn lit(self) -> Option<Lit> {
        match self {
            Atom::Lit(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_const(self) -> bool {
        !matches!(self, Atom::Lit(_))
    }
}

impl Not for Atom {
    type Output = Atom;
    fn not(self) -> Atom {
        match self {
            Atom::True => Atom::False,
            Atom::False => Atom::True,
            Atom::Lit(l) => Atom::Lit(!l),
        }
    }
}

impl From<Lit> for Atom {
    fn from(l: Lit) -> Atom {
        Atom::Lit(l)
    }
}

impl From<Var> for Atom {
    fn from(v: Var) -> Atom {
        Atom::Lit(v.pos())
    }
}

/// Hands out variable indices. Named (external) variables are created
/// first by the caller; everything after that is auxiliary.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    next: u32,
    by_name: HashMap<String, Var>,
    names: Vec<(Var, String)>,
}

impl VarPool {
    pub fn new() -> VarPool {
        VarPool { next: 1, ..Default::default() }
    }

    /// A pool whose first fresh variable is `first`.
    pub fn starting_at(first: u32) -> VarPool {
        VarPool { next: first.max(1), ..Default::default() }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    pub fn reserve_block(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.fresh()).collect()
    }

    /// Look up a named variable, creating it on first use.
    pub fn named(&mut self, name: &str) -> Var {
        if let Some(&v) = self.by_name.get(name) {
            return v;
        }
        let v = self.fresh();
        self.by_name.insert(name.to_string(), v);
        self.names.push((v, name.to_string()));
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    /// Named variables in creation order.
    pub fn names(&self) -> &[(Var, String)] {
        &self.names
    }

    /// Number of variables handed out so far.
    pub fn num_vars(&self) -> u32 {
        self.next - 1
    }
}

/// Collects clauses, folding constants, duplicate literals and tautologies.
/// An empty clause does not get stored; it raises the `unsat` flag instead.
#[derive(Clone, Debug, Default)]
pub struct ClauseSink {
    clauses: Vec<Vec<Lit>>,
    unsat: bool,
    max_var: u32,
}

impl ClauseSink {
    pub fn new() -> ClauseSink {
        ClauseSink::default()
    }

    /// Add a clause. Returns false if it was dropped (satisfied by a
    /// constant or tautological).
    pub fn add<I>(&mut self, atoms: I) -> bool
    where
        I: IntoIterator,
        I::Item: Into<Atom>,
    {
        let mut lits: Vec<Lit> = Vec::new();
        for a in atoms {
            match a.into() {
                Atom::True => return false,
                Atom::False => {}
                Atom::Lit(l) => {
                    if lits.contains(&!l) {
                        return false;
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                    }
                }
            }
        }
        if lits.is_empty() {
            self.unsat = true;
            return true;
        }
        for l in &lits {
            self.max_var = self.max_var.max(l.var().index());
        }
        self.clauses.push(lits);
        true
    }

    pub fn add_unit(&mut self, a: impl Into<Atom>) -> bool {
        self.add([a.into()])
    }

    /// Mark the formula unsatisfiable (an empty clause).
    pub fn add_empty(&mut self) {
        self.unsat = true;
    }

    pub fn append(&mut self, other: ClauseSink) {
        self.unsat |= other.unsat;
        self.max_var = self.max_var.max(other.max_var);
        self.clauses.extend(other.clauses);
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Clause count as written to DIMACS, the empty clause included.
    pub fn num_clauses(&self) -> usize {
        self.clauses.len() + usize::from(self.unsat)
    }

    pub fn max_var(&self) -> u32 {
        self.max_var
    }

    /// Drop the clause at `index` (used by mutation tests).
    pub fn remove(&mut self, index: usize) -> Vec<Lit> {
        self.clauses.remove(index)
    }

    /// Write `p cnf V C` followed by the clauses. `num_vars` is raised to the
    /// largest variable actually used.
    pub fn write_dimacs<W: Write>(&self, num_vars: u32, out: &mut W) -> io::Result<()> {
        let v = num_vars.max(self.max_var);
        writeln!(out, "p cnf {} {}", v, self.num_clauses())?;
        if self.unsat {
            writeln!(out, "0")?;
        }
        let mut line = String::new();
        for c in &self.clauses {
            line.clear();
            for l in c {
                line.push_str(&l.dimacs().to_string());
                line.push(' ');
            }
            line.push('0');
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_dimacs_string(&self, num_vars: u32) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(num_vars, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}
