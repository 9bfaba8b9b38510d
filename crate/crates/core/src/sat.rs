//! Complete satisfiability checks. Assumption queries go through the
//! propagator's bounded search first and fall back to a CDCL solver when
//! the chronological search hits its conflict budget.

use varisat::ExtendFormula;

use crate::cnf::{ClauseSink, Lit};
use crate::prop::Propagator;

const BUDGET: usize = 200;

fn to_cdcl(l: Lit) -> varisat::Lit {
    varisat::Lit::from_dimacs(l.dimacs() as isize)
}

fn cdcl_solver(num_vars: u32, sink: &ClauseSink) -> varisat::Solver<'static> {
    let mut s = varisat::Solver::new();
    for _ in 0..num_vars {
        s.new_var();
    }
    for c in sink.clauses() {
        let lits: Vec<varisat::Lit> = c.iter().map(|&l| to_cdcl(l)).collect();
        s.add_clause(&lits);
    }
    if sink.is_unsat() {
        s.add_clause(&[]);
    }
    s
}

pub struct Checker {
    prop: Propagator,
    cdcl: varisat::Solver<'static>,
}

impl Checker {
    pub fn new(num_vars: u32, sink: &ClauseSink) -> Checker {
        let num_vars = num_vars.max(sink.max_var());
        Checker { prop: Propagator::new(num_vars, sink), cdcl: cdcl_solver(num_vars, sink) }
    }

    pub fn satisfiable_with(&mut self, assumptions: &[Lit]) -> bool {
        let base = self.prop.level();
        self.prop.new_level();
        let fast = if assumptions.iter().all(|&l| self.prop.assume(l)) {
            self.prop.search_bounded(BUDGET)
        } else {
            Some(false)
        };
        self.prop.backtrack(base);
        fast.unwrap_or_else(|| {
            let lits: Vec<varisat::Lit> = assumptions.iter().map(|&l| to_cdcl(l)).collect();
            self.cdcl.assume(&lits);
            self.cdcl.solve().expect("solver without proof output cannot fail")
        })
    }
}

/// A model indexed by variable (slot 0 unused), or `None` if unsatisfiable.
pub fn solve(num_vars: u32, sink: &ClauseSink) -> Option<Vec<bool>> {
    let n = num_vars.max(sink.max_var());
    let mut s = cdcl_solver(n, sink);
    if !s.solve().expect("solver without proof output cannot fail") {
        return None;
    }
    let mut m = vec![false; n as usize + 1];
    for l in s.model().unwrap_or_default() {
        let d = l.to_dimacs();
        if d > 0 {
            m[d as usize] = true;
        }
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Var;

    #[test]
    fn pigeonhole_needs_the_fallback() {
        // 6 pigeons, 5 holes: hard for plain backtracking, easy for CDCL
        let (p, h) = (6u32, 5u32);
        let v = |i: u32, j: u32| Var::new(i * h + j + 1);
        let mut s = ClauseSink::new();
        for i in 0..p {
            s.add((0..h).map(|j| v(i, j).pos()));
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add([v(a, j).neg(), v(b, j).neg()]);
                }
            }
        }
        let mut c = Checker::new(p * h, &s);
        assert!(!c.satisfiable_with(&[]));
        assert!(solve(p * h, &s).is_none());
        assert!(!c.satisfiable_with(&[v(0, 0).pos()]));
    }

    #[test]
    fn models_satisfy_clauses() {
        let mut s = ClauseSink::new();
        s.add([Lit::from_dimacs(1), Lit::from_dimacs(2)]);
        s.add([Lit::from_dimacs(-1)]);
        let m = solve(3, &s).unwrap();
        assert_eq!(m, vec![false, false, true, m[3]]);
        let mut c = Checker::new(3, &s);
        assert!(c.satisfiable_with(&[Lit::from_dimacs(3)]));
        assert!(!c.satisfiable_with(&[Lit::from_dimacs(-2)]));
    }
}
