//! Polynomial watchdogs. The weighted sum plus a slack `T` is split into
//! bit buckets, each bucket is counted in unary, and halves of the lower
//! counts are carried upward. A single output `w` is implied whenever the
//! sum exceeds `K`.
//!
//! The local variants build one watchdog per term `x` for the constraint
//! left when `x`'s group is removed, and add `!w | !x`.

use std::collections::HashMap;

use crate::cnf::{Atom, ClauseSink, Var, VarPool};
use crate::model::{PbAmo, Trivial};
use crate::tree::{balanced, Shape};

/// `(p, T, m)`: bit width, slack and watched count for `K` under largest
/// coefficient `max_q`.
pub fn params(max_q: u64, k: u64) -> (u32, u64, u64) {
    let p = 63 - max_q.max(1).leading_zeros();
    let step = 1u64 << p;
    let t = (step - (k + 1) % step) % step;
    (p, t, (k + 1 + t) / step)
}

fn bit(v: u64, r: u32) -> bool {
    v >> r & 1 == 1
}

/// Sorted unary counter of the inputs seen so far; position `j` (from 0)
/// is implied once `j + 1` inputs are true.
pub type Unary = Vec<Atom>;

fn leading_true(u: &[Atom]) -> usize {
    u.iter().take_while(|a| **a == Atom::True).count()
}

/// Unary sum of two counters, truncated to `limit` outputs if given.
pub fn merge(a: &[Atom], b: &[Atom], limit: Option<usize>, pool: &mut VarPool, sink: &mut ClauseSink) -> Unary {
    let full = a.len() + b.len();
    let len = limit.map_or(full, |l| l.min(full));
    let known = leading_true(a) + leading_true(b);
    let out: Unary = (0..len).map(|j| if j < known { Atom::True } else { pool.fresh().into() }).collect();
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            if i + j == 0 {
                continue;
            }
            let na = if i == 0 { Atom::False } else { !a[i - 1] };
            let nb = if j == 0 { Atom::False } else { !b[j - 1] };
            let o = out[(i + j).min(len) - 1];
            sink.add([na, nb, o]);
        }
    }
    out
}

/// Totalizer over `inputs` on a balanced tree.
pub fn unary_count(inputs: &[Atom], pool: &mut VarPool, sink: &mut ClauseSink) -> Unary {
    if inputs.is_empty() {
        return Vec::new();
    }
    let tree = balanced(inputs.len());
    let mut outs: Vec<Unary> = Vec::with_capacity(tree.nodes.len());
    for node in &tree.nodes {
        let u = match *node {
            Shape::Leaf(i) => vec![inputs[i]],
            Shape::Inner(l, r) => merge(&outs[l], &outs[r], None, pool, sink),
        };
        outs.push(u);
    }
    outs.pop().expect("root")
}

/// Every second output: `floor(n / 2)` when `odd` is false, and
/// `floor((n + 1) / 2)` when it is true.
pub fn half(u: &[Atom], odd: bool) -> Unary {
    let start = if odd { 0 } else { 1 };
    u.iter().skip(start).step_by(2).copied().collect()
}

/// Buckets of the plain watchdog: bucket `r` holds the true constant when
/// bit `r` of the slack is set, then every term with bit `r` set. Terms are
/// given as one atom per group and bit (`None` when absent).
fn buckets(per_group: &[Vec<Option<Atom>>], p: u32, t: u64) -> Vec<Vec<Atom>> {
    (0..=p)
        .map(|r| {
            let mut b: Vec<Atom> = Vec::new();
            if bit(t, r) {
                b.push(Atom::True);
            }
            b.extend(per_group.iter().filter_map(|g| g[r as usize]));
            b
        })
        .collect()
}

/// Bucket contents of the plain watchdog over single terms.
pub fn term_buckets(c: &PbAmo) -> Vec<Vec<Atom>> {
    let (p, t, _) = params(c.max_coef(), c.k);
    let per: Vec<Vec<Option<Atom>>> = c
        .terms()
        .map(|x| (0..=p).map(|r| bit(x.coef, r).then(|| x.var.into())).collect())
        .collect();
    buckets(&per, p, t)
}

/// Per-group, per-bit atoms: absent, the member itself, or a fresh
/// variable implied by each member with that bit.
fn group_bits(c: &PbAmo, p: u32, pool: &mut VarPool, sink: &mut ClauseSink) -> Vec<Vec<Option<Atom>>> {
    c.groups
        .iter()
        .map(|g| {
            (0..=p)
                .map(|r| {
                    let hits: Vec<Var> = g.iter().filter(|t| bit(t.coef, r)).map(|t| t.var).collect();
                    match hits.len() {
                        0 => None,
                        1 => Some(hits[0].into()),
                        _ => {
                            let y = pool.fresh();
                            for x in hits {
                                sink.add([x.neg(), y.pos()]);
                            }
                            Some(y.into())
                        }
                    }
                })
                .collect()
        })
        .collect()
}

fn watch(bs: &[Vec<Atom>], m: u64, pool: &mut VarPool, sink: &mut ClauseSink) -> Atom {
    let mut s = unary_count(&bs[0], pool, sink);
    for b in &bs[1..] {
        let u = unary_count(b, pool, sink);
        s = merge(&u, &half(&s, false), None, pool, sink);
    }
    s.get(m as usize - 1).copied().unwrap_or(Atom::False)
}

/// Build the watchdog and return its output `w` without constraining it.
pub fn watchdog_output(c: &PbAmo, grouped: bool, pool: &mut VarPool, sink: &mut ClauseSink) -> Atom {
    let c = if grouped { c.clone() } else { c.flattened() };
    let (p, t, m) = params(c.max_coef(), c.k);
    let per = group_bits(&c, p, pool, sink);
    let bs = buckets(&per, p, t);
    watch(&bs, m, pool, sink)
}

pub fn encode_ggpw(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return;
    }
    let w = watchdog_output(c, true, pool, sink);
    sink.add_unit(!w);
}

pub fn encode_gpw(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_ggpw(&c.flattened(), pool, sink);
}

/// Shared structures of the local watchdogs: implicant-set variables,
/// totalizers keyed by their leaf atoms, and merges keyed by their inputs.
#[derive(Default)]
pub struct SharedWatchdogs {
    lists: Vec<Unary>,
    implicants: HashMap<Vec<Var>, Atom>,
    totalizers: HashMap<Vec<Atom>, usize>,
    merges: HashMap<(Option<usize>, bool, Option<usize>, Option<usize>), Option<usize>>,
}

impl SharedWatchdogs {
    fn store(&mut self, u: Unary) -> usize {
        self.lists.push(u);
        self.lists.len() - 1
    }

    /// Distinct totalizer nodes built so far, leaves included.
    pub fn num_totalizer_nodes(&self) -> usize {
        self.totalizers.len()
    }

    pub fn num_merges(&self) -> usize {
        self.merges.len()
    }

    fn implicant(&mut self, mut xs: Vec<Var>, pool: &mut VarPool, sink: &mut ClauseSink) -> Option<Atom> {
        match xs.len() {
            0 => None,
            1 => Some(xs[0].into()),
            _ => {
                xs.sort();
                if let Some(&a) = self.implicants.get(&xs) {
                    return Some(a);
                }
                let y = pool.fresh();
                for x in &xs {
                    sink.add([x.neg(), y.pos()]);
                }
                self.implicants.insert(xs, y.into());
                Some(y.into())
            }
        }
    }

    /// Totalizer over the leaves of `tree` under `node`, skipping leaf
    /// `excluded`. A node that loses one child is replaced by the other.
    pub fn subtree_count(
        &mut self,
        leaves: &[Atom],
        tree: &crate::tree::Tree,
        node: usize,
        excluded: Option<usize>,
        pool: &mut VarPool,
        sink: &mut ClauseSink,
    ) -> Option<usize> {
        let under: Vec<usize> = tree.leaves_under(node).into_iter().filter(|&i| Some(i) != excluded).collect();
        if under.is_empty() {
            return None;
        }
        let key: Vec<Atom> = under.iter().map(|&i| leaves[i]).collect();
        if let Some(&id) = self.totalizers.get(&key) {
            return Some(id);
        }
        let id = match tree.nodes[node] {
            Shape::Leaf(i) => self.store(vec![leaves[i]]),
            Shape::Inner(l, r) => {
                let a = self.subtree_count(leaves, tree, l, excluded, pool, sink);
                let b = self.subtree_count(leaves, tree, r, excluded, pool, sink);
                match (a, b) {
                    (Some(a), Some(b)) => {
                        let u = merge(&self.lists[a].clone(), &self.lists[b].clone(), None, pool, sink);
                        self.store(u)
                    }
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => unreachable!(),
                }
            }
        };
        self.totalizers.insert(key, id);
        Some(id)
    }

    fn step(
        &mut self,
        prev: Option<usize>,
        carry: bool,
        bucket: Option<usize>,
        limit: Option<usize>,
        pool: &mut VarPool,
        sink: &mut ClauseSink,
    ) -> Option<usize> {
        let key = (prev, carry, bucket, limit);
        if let Some(&r) = self.merges.get(&key) {
            return r;
        }
        let h = prev.map(|s| half(&self.lists[s], carry)).unwrap_or_default();
        let b = bucket.map(|u| self.lists[u].clone()).unwrap_or_default();
        let out = match (b.is_empty(), h.is_empty()) {
            (true, true) => None,
            (false, true) if limit.is_none() => bucket,
            (false, true) | (true, false) => {
                let mut u = if b.is_empty() { h } else { b };
                if let Some(l) = limit {
                    u.truncate(l);
                }
                Some(self.store(u))
            }
            (false, false) => {
                let u = merge(&b, &h, limit, pool, sink);
                Some(self.store(u))
            }
        };
        self.merges.insert(key, out);
        out
    }
}

/// Local watchdogs over AMO groups; returns the sharing statistics.
pub fn encode_glpw_with(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) -> Option<SharedWatchdogs> {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return None;
    }
    let (p, _, _) = params(c.max_coef(), c.k);
    let mut sh = SharedWatchdogs::default();
    // y[i][r]
    let mut y: Vec<Vec<Option<Atom>>> = Vec::new();
    for g in &c.groups {
        let mut row = Vec::new();
        for r in 0..=p {
            let xs: Vec<Var> = g.iter().filter(|t| bit(t.coef, r)).map(|t| t.var).collect();
            row.push(sh.implicant(xs, pool, sink));
        }
        y.push(row);
    }
    // bucket r: present groups and their atoms, with a balanced tree
    let mut per_bit: Vec<(Vec<usize>, Vec<Atom>, Option<crate::tree::Tree>)> = Vec::new();
    for r in 0..=p as usize {
        let present: Vec<usize> = (0..c.groups.len()).filter(|&i| y[i][r].is_some()).collect();
        let atoms: Vec<Atom> = present.iter().map(|&i| y[i][r].expect("present")).collect();
        let tree = (!atoms.is_empty()).then(|| balanced(atoms.len()));
        per_bit.push((present, atoms, tree));
    }
    let maxima: Vec<u64> = (0..c.groups.len()).map(|i| c.group_max(i)).collect();
    let total: u64 = maxima.iter().sum();
    for (i, g) in c.groups.iter().enumerate() {
        let rest = total - maxima[i];
        for term in g {
            let k = c.k - term.coef;
            if rest <= k {
                continue;
            }
            let step = 1u64 << p;
            let t = (step - (k + 1) % step) % step;
            let m = (k + 1 + t) / step;
            let mut s: Option<usize> = None;
            let mut carry = false;
            for r in 0..=p {
                let (present, atoms, tree) = &per_bit[r as usize];
                let u = match tree {
                    Some(tree) => {
                        let ex = present.iter().position(|&j| j == i);
                        sh.subtree_count(atoms, tree, tree.root(), ex, pool, sink)
                    }
                    None => None,
                };
                let c_r = bit(t, r);
                let need = (m - u64::from(c_r)) as usize;
                let limit = (r == p).then_some(need);
                s = if r == 0 && limit.is_none() { u } else { sh.step(s, carry, u, limit, pool, sink) };
                carry = c_r;
            }
            let need = (m - u64::from(carry)) as usize;
            let w = s.and_then(|id| sh.lists[id].get(need - 1).copied()).unwrap_or(Atom::False);
            sink.add([!w, term.var.neg().into()]);
        }
    }
    Some(sh)
}

pub fn encode_glpw(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_glpw_with(c, pool, sink);
}

pub fn encode_lpw(c: &PbAmo, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_glpw_with(&c.flattened(), pool, sink);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bucket_example(grouped: bool) -> PbAmo {
        let x: Vec<Var> = (1..=4).map(Var::new).collect();
        let c = PbAmo::from_groups(vec![vec![(2, x[0]), (3, x[1])], vec![(4, x[2]), (7, x[3])]], 8);
        if grouped {
            c
        } else {
            c.flattened()
        }
    }

    #[test]
    fn parameters() {
        assert_eq!(params(7, 8), (2, 3, 3));
        assert_eq!(params(1, 5), (0, 0, 6));
    }

    #[test]
    fn plain_buckets() {
        let x = |i: u32| Atom::from(Var::new(i));
        let b = term_buckets(&bucket_example(false));
        assert_eq!(b[0], vec![Atom::True, x(2), x(4)]);
        assert_eq!(b[1], vec![Atom::True, x(1), x(2), x(4)]);
        assert_eq!(b[2], vec![x(3), x(4)]);
    }

    #[test]
    fn group_bit_atoms() {
        let mut pool = VarPool::starting_at(5);
        let mut sink = ClauseSink::new();
        let y = group_bits(&bucket_example(true), 2, &mut pool, &mut sink);
        assert_eq!(y[0][0], Some(Var::new(2).into()));
        assert_eq!(y[0][2], None);
        assert_eq!(y[1][0], Some(Var::new(4).into()));
        assert_eq!(y[1][1], Some(Var::new(4).into()));
        assert_eq!(y[0][1], Some(Var::new(5).into()));
        assert_eq!(y[1][2], Some(Var::new(6).into()));
        assert_eq!(sink.num_clauses(), 4);
    }

    #[test]
    fn half_positions() {
        let u: Vec<Atom> = (1..=5).map(|i| Atom::from(Var::new(i))).collect();
        assert_eq!(half(&u, false), vec![u[1], u[3]]);
        assert_eq!(half(&u, true), vec![u[0], u[2], u[4]]);
    }

    #[test]
    fn shared_totalizers_over_eight_leaves() {
        let mut pool = VarPool::new();
        let mut sink = ClauseSink::new();
        let leaves: Vec<Atom> = pool.reserve_block(8).into_iter().map(Atom::from).collect();
        let tree = balanced(8);
        let mut sh = SharedWatchdogs::default();
        for ex in 0..8 {
            sh.subtree_count(&leaves, &tree, tree.root(), Some(ex), &mut pool, &mut sink);
        }
        assert_eq!(sh.num_totalizer_nodes(), 30);
    }
}
