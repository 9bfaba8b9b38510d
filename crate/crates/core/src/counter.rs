//! Sequential weight counter, one counter per AMO group.
//!
//! Counter `i` holds the running sum of groups `1..=i` in unary:
//! `s[i][j]` is implied when that sum reaches `j`. Only the first `N-1`
//! counters are materialized; the last group is checked against counter
//! `N-1` directly.

use crate::cnf::{Atom, ClauseSink, Var, VarPool};
use crate::model::PbAmo;

pub fn encode_gswc(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    let n = c.groups.len();
    let k = c.k as usize;
    if n < 2 || k == 0 {
        return;
    }
    // s[i][j - 1] for counters 1..n-1 stored at i - 1
    let s: Vec<Vec<Var>> = (1..n).map(|_| pool.reserve_block(k)).collect();
    let at = |i: usize, j: usize| -> Atom {
        if i == 0 {
            Atom::False
        } else {
            s[i - 1][j - 1].into()
        }
    };
    for i in 1..=n {
        let group = &c.groups[i - 1];
        if i >= 2 && i < n {
            for j in 1..=k {
                sink.add([!at(i - 1, j), at(i, j)]);
            }
        }
        for t in group {
            let q = t.coef as usize;
            let x: Atom = t.var.into();
            if i < n {
                for j in 1..=q {
                    sink.add([!x, at(i, j)]);
                }
                if i >= 2 {
                    for j in 1..=k.saturating_sub(q) {
                        sink.add([!at(i - 1, j), !x, at(i, j + q)]);
                    }
                }
            }
            if i >= 2 {
                sink.add([!at(i - 1, k + 1 - q), !x]);
            }
        }
    }
}

pub fn encode_swc(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_gswc(&c.flattened(), pool, sink);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_var_count() {
        let x: Vec<Var> = (1..=4).map(Var::new).collect();
        let c = PbAmo::from_groups(x.iter().zip([2, 3, 4, 7]).map(|(&v, q)| vec![(q, v)]).collect(), 8);
        let mut pool = VarPool::starting_at(5);
        let mut sink = ClauseSink::new();
        encode_swc(&c, &mut pool, &mut sink);
        assert_eq!(pool.num_vars() - 4, 3 * 8);
    }
}
