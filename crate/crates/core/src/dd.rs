//! Reduced ordered decision diagrams for `sum q*x <= K`, one layer per AMO
//! group (a BDD when every group is a singleton), and their CNF encoding.

use std::collections::BTreeMap;

use crate::cnf::{Atom, ClauseSink, Var, VarPool};
use crate::model::PbAmo;

pub type NodeId = usize;
pub const BOTTOM: NodeId = 0;
pub const TOP: NodeId = 1;

const NEG_INF: i64 = i64::MIN / 4;
const POS_INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
pub struct DdNode {
    pub layer: usize,
    pub else_child: NodeId,
    pub selectors: Vec<(Var, NodeId)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum GroupOrder {
    #[default]
    Input,
    /// Groups with the largest coefficient first.
    DescendingMax,
}

/// A diagram built by the interval method: every node of layer `i` owns
/// the interval of remaining capacities for which it is the answer.
pub struct Mdd {
    nodes: Vec<Option<DdNode>>,
    root: NodeId,
    layers: Vec<BTreeMap<i64, (i64, NodeId)>>,
    groups: Vec<Vec<(i64, Var)>>,
    suffix_max: Vec<i64>,
}

impl Mdd {
    pub fn build(c: &PbAmo, order: GroupOrder) -> Mdd {
        let mut groups: Vec<Vec<(i64, Var)>> = c
            .groups
            .iter()
            .map(|g| g.iter().map(|t| (t.coef as i64, t.var)).collect())
            .collect();
        if order == GroupOrder::DescendingMax {
            groups.sort_by_key(|g| std::cmp::Reverse(g.iter().map(|t| t.0).max().unwrap_or(0)));
        }
        let n = groups.len();
        let mut suffix_max = vec![0i64; n + 1];
        for i in (0..n).rev() {
            suffix_max[i] = suffix_max[i + 1] + groups[i].iter().map(|t| t.0).max().unwrap_or(0);
        }
        let mut dd = Mdd {
            nodes: vec![None, None],
            root: TOP,
            layers: vec![BTreeMap::new(); n + 1],
            groups,
            suffix_max,
        };
        dd.root = dd.make(0, c.k as i64).0;
        dd
    }

    fn make(&mut self, i: usize, k: i64) -> (NodeId, i64, i64) {
        if k < 0 {
            return (BOTTOM, NEG_INF, -1);
        }
        if self.suffix_max[i] <= k {
            return (TOP, self.suffix_max[i], POS_INF);
        }
        if let Some((&lo, &(hi, id))) = self.layers[i].range(..=k).next_back() {
            if k <= hi {
                return (id, lo, hi);
            }
        }
        let (else_child, mut lo, mut hi) = self.make(i + 1, k);
        let mut selectors = Vec::new();
        let terms = self.groups[i].clone();
        for (q, x) in terms {
            let (c, clo, chi) = self.make(i + 1, k - q);
            lo = lo.max(clo.saturating_add(q));
            hi = hi.min(chi.saturating_add(q));
            selectors.push((x, c));
        }
        let id = if selectors.iter().all(|&(_, c)| c == else_child) {
            else_child
        } else {
            self.nodes.push(Some(DdNode { layer: i, else_child, selectors }));
            self.nodes.len() - 1
        };
        self.layers[i].insert(lo, (hi, id));
        (id, lo, hi)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Option<&DdNode> {
        self.nodes.get(id).and_then(Option::as_ref)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Nonterminal nodes reachable from the root, in creation order.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        2..self.nodes.len()
    }

    /// Follow the diagram under an assignment.
    pub fn eval(&self, value: impl Fn(Var) -> bool) -> bool {
        let mut id = self.root;
        while let Some(n) = self.node(id) {
            id = n.selectors.iter().find(|(x, _)| value(*x)).map_or(n.else_child, |s| s.1);
        }
        id == TOP
    }

    pub fn encode(&self, pool: &mut VarPool, sink: &mut ClauseSink) {
        let mut atom = vec![Atom::False, Atom::True];
        for _ in 2..self.nodes.len() {
            atom.push(pool.fresh().into());
        }
        for id in self.node_ids() {
            let n = self.node(id).expect("nonterminal");
            let v = atom[id];
            sink.add([atom[n.else_child], !v]);
            for &(x, c) in &n.selectors {
                if c != n.else_child {
                    sink.add([atom[c], x.neg().into(), !v]);
                }
            }
        }
        sink.add_unit(atom[self.root]);
    }
}

pub fn encode_mdd(c: &PbAmo, order: GroupOrder, pool: &mut VarPool, sink: &mut ClauseSink) {
    Mdd::build(c, order).encode(pool, sink);
}

/// The same diagram with singleton layers.
pub fn encode_bdd(c: &PbAmo, order: GroupOrder, pool: &mut VarPool, sink: &mut ClauseSink) {
    Mdd::build(&c.flattened(), order).encode(pool, sink);
}
