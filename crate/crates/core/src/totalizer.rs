//! Generalized totalizers over AMO groups, and the interval-reduced variant.
//!
//! Every tree node stores the set of partial sums its leaves can take,
//! saturated at `K+1`. Leaves are whole AMO groups; with singleton groups
//! this is the plain totalizer.

use crate::cnf::{Atom, ClauseSink, VarPool};
use crate::model::{PbAmo, Term, Trivial};
use crate::tree::{balanced, min_ratio, saturated_sum, Shape, Tree, TreeHeuristic};

pub const INF: u64 = u64::MAX;

/// A tree over the groups of a constraint with the value set of each node.
#[derive(Clone, Debug)]
pub struct ValueTree {
    pub tree: Tree,
    pub vals: Vec<Vec<u64>>,
    pub k: u64,
}

fn leaf_values(group: &[Term]) -> Vec<u64> {
    let mut v: Vec<u64> = std::iter::once(0).chain(group.iter().map(|t| t.coef)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl ValueTree {
    pub fn build(c: &PbAmo, heuristic: TreeHeuristic) -> ValueTree {
        let leaves: Vec<Vec<u64>> = c.groups.iter().map(|g| leaf_values(g)).collect();
        let cap = c.k + 1;
        let tree = match heuristic {
            TreeHeuristic::Balanced => balanced(leaves.len()),
            TreeHeuristic::MinRatio => min_ratio(&leaves, cap),
        };
        let mut vals: Vec<Vec<u64>> = Vec::with_capacity(tree.nodes.len());
        for node in &tree.nodes {
            let v = match *node {
                Shape::Leaf(i) => leaves[i].iter().map(|&q| q.min(cap)).collect(),
                Shape::Inner(l, r) => saturated_sum(&vals[l], &vals[r], cap),
            };
            vals.push(v);
        }
        ValueTree { tree, vals, k: c.k }
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }
}

/// One row of the per-node statistics dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeStats {
    pub node: usize,
    pub depth: usize,
    pub leaf: bool,
    pub vals: usize,
    pub intervals: usize,
    /// Variables attached to the node, aliases of input variables included.
    pub vars: usize,
}

/// Variables of a leaf value: the input variable when exactly one term has
/// the value, otherwise a fresh variable implied by each such term.
fn leaf_atom(group: &[Term], value: u64, pool: &mut VarPool, sink: &mut ClauseSink) -> Atom {
    let hits: Vec<&Term> = group.iter().filter(|t| t.coef == value).collect();
    if hits.len() == 1 {
        return hits[0].var.into();
    }
    let y = pool.fresh();
    for t in hits {
        sink.add([t.var.neg(), y.pos()]);
    }
    y.into()
}

/// Encode with the value tree; returns per-node statistics.
pub fn encode_ggt_with(
    c: &PbAmo,
    heuristic: TreeHeuristic,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Vec<NodeStats> {
    ggt(c, heuristic, true, pool, sink)
}

/// Like [`encode_ggt_with`] but with a variable for every root value, not
/// only for `K+1`.
pub fn encode_ggt_all_root_values(
    c: &PbAmo,
    heuristic: TreeHeuristic,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Vec<NodeStats> {
    ggt(c, heuristic, false, pool, sink)
}

fn ggt(
    c: &PbAmo,
    heuristic: TreeHeuristic,
    prune_root: bool,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Vec<NodeStats> {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return Vec::new();
    }
    let vt = ValueTree::build(c, heuristic);
    let cap = c.k + 1;
    let root = vt.root();
    let mut vars: Vec<Vec<(u64, Atom)>> = Vec::with_capacity(vt.tree.nodes.len());
    for (id, node) in vt.tree.nodes.iter().enumerate() {
        let mut mine: Vec<(u64, Atom)> = Vec::new();
        match *node {
            Shape::Leaf(g) => {
                for &w in vt.vals[id].iter().filter(|&&w| w > 0) {
                    mine.push((w, leaf_atom(&c.groups[g], w, pool, sink)));
                }
            }
            Shape::Inner(l, r) => {
                for &w in vt.vals[id].iter().filter(|&&w| w > 0) {
                    if !prune_root || id != root || w == cap {
                        mine.push((w, pool.fresh().into()));
                    }
                }
                let find = |w: u64| mine.iter().find(|p| p.0 == w).map(|p| p.1);
                for &(w, t) in vars[l].iter().chain(vars[r].iter()) {
                    if let Some(o) = find(w) {
                        sink.add([!t, o]);
                    }
                }
                for &(w1, a) in &vars[l] {
                    for &(w2, b) in &vars[r] {
                        if let Some(o) = find((w1 + w2).min(cap)) {
                            sink.add([!a, !b, o]);
                        }
                    }
                }
            }
        }
        vars.push(mine);
    }
    if let Some(&(_, top)) = vars[root].iter().find(|p| p.0 == cap) {
        sink.add_unit(!top);
    }
    stats_rows(&vt.tree, &vt.vals, None, &vars)
}

fn stats_rows(
    tree: &Tree,
    vals: &[Vec<u64>],
    intervals: Option<&[Vec<(u64, u64)>]>,
    vars: &[Vec<(u64, Atom)>],
) -> Vec<NodeStats> {
    (0..tree.nodes.len())
        .map(|id| NodeStats {
            node: id,
            depth: tree.depth_of(id),
            leaf: matches!(tree.nodes[id], Shape::Leaf(_)),
            vals: vals[id].len(),
            intervals: intervals.map_or(vals[id].len(), |iv| iv[id].len()),
            vars: vars[id].len(),
        })
        .collect()
}

pub fn encode_ggt(c: &PbAmo, heuristic: TreeHeuristic, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_ggt_with(c, heuristic, pool, sink);
}

pub fn encode_gt(c: &PbAmo, heuristic: TreeHeuristic, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_ggt_with(&c.flattened(), heuristic, pool, sink);
}

/// A value tree whose value sets are cut into intervals of sums that can
/// be told apart from each other.
#[derive(Clone, Debug)]
pub struct IntervalTree {
    pub vt: ValueTree,
    pub intervals: Vec<Vec<(u64, u64)>>,
}

fn locate(intervals: &[(u64, u64)], v: u64) -> Option<usize> {
    intervals.iter().position(|&(lo, hi)| lo <= v && v <= hi)
}

impl IntervalTree {
    pub fn build(vt: ValueTree) -> IntervalTree {
        let cap = vt.k + 1;
        let n = vt.tree.nodes.len();
        let mut intervals: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
        let root = vt.root();
        let below: Vec<u64> = vt.vals[root].iter().copied().filter(|&w| w < cap).collect();
        intervals[root].push((0, below.last().copied().unwrap_or(0)));
        if vt.vals[root].contains(&cap) {
            intervals[root].push((cap, INF));
        }
        for id in (0..n).rev() {
            if let Shape::Inner(l, r) = vt.tree.nodes[id] {
                for (child, sibling) in [(l, r), (r, l)] {
                    let iv = split_child(&vt.vals[child], &vt.vals[sibling], &intervals[id], cap);
                    intervals[child] = iv;
                }
            }
        }
        IntervalTree { vt, intervals }
    }

    /// Every pair of child intervals lands inside a single parent interval.
    pub fn check_monotone(&self) -> bool {
        for (id, node) in self.vt.tree.nodes.iter().enumerate() {
            if let Shape::Inner(l, r) = *node {
                for &(a, b) in &self.intervals[l] {
                    for &(c, d) in &self.intervals[r] {
                        let (lo, hi) = (a.saturating_add(c), b.saturating_add(d));
                        if !self.intervals[id].iter().any(|&(e, f)| e <= lo && hi <= f) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn split_child(vals: &[u64], sibling: &[u64], parent: &[(u64, u64)], cap: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = vals.iter().map(|&v| if v >= cap { (cap, INF) } else { (v, v) }).collect();
    let mut merged: Vec<(u64, u64)> = Vec::with_capacity(out.len());
    for iv in out.drain(..) {
        if let Some(last) = merged.last_mut() {
            let same = sibling.iter().all(|&w| {
                let a = locate(parent, w.saturating_add(last.1).min(cap));
                let b = locate(parent, w.saturating_add(iv.0).min(cap));
                a.is_some() && a == b
            });
            if same {
                last.1 = iv.1;
                continue;
            }
        }
        merged.push(iv);
    }
    merged
}

/// One reduction pass: lower every coefficient to the bottom of its leaf
/// interval. Returns the reduced constraint and whether anything changed.
pub fn reduce_once(c: &PbAmo, heuristic: TreeHeuristic) -> (PbAmo, bool, IntervalTree) {
    let it = IntervalTree::build(ValueTree::build(c, heuristic));
    let mut groups = c.groups.clone();
    let mut changed = false;
    for (id, node) in it.vt.tree.nodes.iter().enumerate() {
        if let Shape::Leaf(g) = *node {
            for &(lo, hi) in &it.intervals[id] {
                if hi > lo {
                    for t in groups[g].iter_mut() {
                        if lo < t.coef && t.coef <= hi {
                            t.coef = lo;
                            changed = true;
                        }
                    }
                }
            }
        }
    }
    for g in groups.iter_mut() {
        g.retain(|t| t.coef > 0);
    }
    groups.retain(|g| !g.is_empty());
    (PbAmo { groups, k: c.k, trivial: c.trivial }, changed, it)
}

fn settled(c: &PbAmo) -> bool {
    c.trivial != Trivial::None || c.groups.len() < 2 || c.sum_of_maxima() <= c.k
}

/// Repeat reduction passes until nothing changes. The returned constraint
/// is marked trivially true when the reduction made it so.
pub fn reduce(c: &PbAmo, heuristic: TreeHeuristic) -> (PbAmo, Option<IntervalTree>, usize) {
    let mut cur = c.clone();
    let mut passes = 0;
    loop {
        if settled(&cur) {
            cur.groups.clear();
            if cur.trivial == Trivial::None {
                cur.trivial = Trivial::AlwaysTrue;
            }
            return (cur, None, passes);
        }
        let (next, changed, it) = reduce_once(&cur, heuristic);
        passes += 1;
        if !changed {
            return (next, Some(it), passes);
        }
        cur = next;
    }
}

pub fn encode_rggt_with(
    c: &PbAmo,
    heuristic: TreeHeuristic,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Vec<NodeStats> {
    let (red, it, _) = reduce(c, heuristic);
    let Some(it) = it else {
        return Vec::new();
    };
    let cap = red.k + 1;
    let tree = &it.vt.tree;
    let root = tree.root();
    let mut vars: Vec<Vec<(u64, u64, Atom)>> = Vec::with_capacity(tree.nodes.len());
    for (id, node) in tree.nodes.iter().enumerate() {
        let ivs = &it.intervals[id];
        let mut mine: Vec<(u64, u64, Atom)> = Vec::new();
        match *node {
            Shape::Leaf(g) => {
                for &(lo, hi) in ivs.iter().filter(|iv| iv.0 > 0) {
                    debug_assert_eq!(lo, hi.min(lo.max(cap)));
                    mine.push((lo, hi, leaf_atom(&red.groups[g], lo, pool, sink)));
                }
            }
            Shape::Inner(l, r) => {
                for &(lo, hi) in ivs.iter().filter(|iv| iv.0 > 0) {
                    mine.push((lo, hi, pool.fresh().into()));
                }
                let find = |lo: u64, hi: u64| {
                    let pos = ivs.iter().position(|&(e, f)| e <= lo && hi <= f);
                    debug_assert!(pos.is_some(), "child interval [{lo},{hi}] not covered");
                    let (e, _) = ivs[pos?];
                    mine.iter().find(|m| m.0 == e).map(|m| m.2)
                };
                for &(a, b, t) in vars[l].iter().chain(vars[r].iter()) {
                    if let Some(o) = find(a, b) {
                        sink.add([!t, o]);
                    }
                }
                for &(a, b, x) in &vars[l] {
                    for &(c2, d, y) in &vars[r] {
                        if let Some(o) = find(a.saturating_add(c2), b.saturating_add(d)) {
                            sink.add([!x, !y, o]);
                        }
                    }
                }
            }
        }
        vars.push(mine);
    }
    if let Some(&(_, _, top)) = vars[root].iter().find(|m| m.0 == cap) {
        sink.add_unit(!top);
    }
    let flat: Vec<Vec<(u64, Atom)>> = vars.iter().map(|v| v.iter().map(|m| (m.0, m.2)).collect()).collect();
    stats_rows(tree, &it.vt.vals, Some(&it.intervals), &flat)
}

pub fn encode_rggt(c: &PbAmo, heuristic: TreeHeuristic, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_rggt_with(c, heuristic, pool, sink);
}

pub fn encode_rgt(c: &PbAmo, heuristic: TreeHeuristic, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_rggt_with(&c.flattened(), heuristic, pool, sink);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Var;

    fn four_groups() -> PbAmo {
        let x: Vec<Var> = (1..=7).map(Var::new).collect();
        PbAmo::from_groups(
            vec![
                vec![(20, x[0]), (30, x[1])],
                vec![(20, x[2]), (40, x[3])],
                vec![(10, x[4]), (20, x[5])],
                vec![(1, x[6])],
            ],
            55,
        )
    }

    #[test]
    fn first_pass_intervals() {
        let it = IntervalTree::build(ValueTree::build(&four_groups(), TreeHeuristic::Balanced));
        let root = it.vt.root();
        assert_eq!(it.intervals[root], vec![(0, 51), (56, INF)]);
        let Shape::Inner(b, c) = it.vt.tree.nodes[root] else { panic!() };
        assert_eq!(it.intervals[b], vec![(0, 30), (40, 40), (50, 50), (56, INF)]);
        assert_eq!(it.intervals[c], vec![(0, 1), (10, 11), (20, 21)]);
        assert!(it.check_monotone());
    }

    fn intro() -> PbAmo {
        let q = [2, 3, 4, 2, 3, 4];
        PbAmo::from_groups((0..6).map(|i| vec![(q[i], Var::new(i as u32 + 1))]).collect(), 7)
    }

    fn sizes(f: fn(&PbAmo, TreeHeuristic, &mut VarPool, &mut ClauseSink) -> Vec<NodeStats>, h: TreeHeuristic) -> (u32, usize) {
        let mut pool = VarPool::starting_at(7);
        let mut sink = ClauseSink::new();
        f(&intro(), h, &mut pool, &mut sink);
        (pool.num_vars() - 6, sink.num_clauses())
    }

    #[test]
    fn intro_sizes() {
        assert_eq!(sizes(encode_ggt_all_root_values, TreeHeuristic::Balanced), (23, 56));
        assert_eq!(sizes(encode_ggt_with, TreeHeuristic::Balanced), (17, 42));
        assert_eq!(sizes(encode_ggt_with, TreeHeuristic::MinRatio), (11, 25));
    }

    #[test]
    fn reduction_fixpoint() {
        let (red, it, passes) = reduce(&four_groups(), TreeHeuristic::Balanced);
        assert_eq!(passes, 2);
        assert_eq!(red.groups.len(), 3);
        let it = it.unwrap();
        assert_eq!(it.intervals[it.vt.root()], vec![(0, 50), (56, INF)]);
    }
}
