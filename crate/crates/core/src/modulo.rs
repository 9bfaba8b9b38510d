//! Mixed-radix totalizers: every node keeps one unary counter per digit of
//! a mixed-radix base plus carry variables between digits.

use crate::cnf::{Atom, ClauseSink, VarPool};
use crate::model::{PbAmo, Term, Trivial};
use crate::tree::{balanced, Shape, Tree};

/// Digits of `v` in the base, least significant first. The result has one
/// more entry than the base; the last one is unbounded.
pub fn decompose(v: u64, base: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(base.len() + 1);
    let mut rest = v;
    for &l in base {
        out.push(rest % l);
        rest /= l;
    }
    out.push(rest);
    out
}

pub fn compose(digits: &[u64], base: &[u64]) -> u64 {
    let mut v = 0;
    let mut weight = 1;
    for (h, &d) in digits.iter().enumerate() {
        v += d * weight;
        if h < base.len() {
            weight *= base[h];
        }
    }
    v
}

/// Greedy base choice: take the divisor that divides the most (nonzero)
/// current coefficients, preferring the larger on ties, divide, and repeat
/// while the product of the base stays within `k`.
pub fn select_base(coefs: &[u64], k: u64) -> Vec<u64> {
    let mut cur: Vec<u64> = coefs.to_vec();
    let mut base = Vec::new();
    let mut prod: u64 = 1;
    while prod <= k {
        let nonzero: Vec<u64> = cur.iter().copied().filter(|&q| q > 0).collect();
        let Some(&maxc) = nonzero.iter().max() else { break };
        if maxc < 2 {
            break;
        }
        let mut best = (0usize, 0u64);
        for l in 2..=maxc {
            let n = nonzero.iter().filter(|&&q| q % l == 0).count();
            if n >= best.0 {
                best = (n, l);
            }
        }
        let l = best.1;
        base.push(l);
        prod = prod.saturating_mul(l);
        for q in cur.iter_mut() {
            *q /= l;
        }
    }
    base
}

/// Per-node digit counters: `digits[h]` lists `(value, atom)` for values
/// `>= 1` (value 0 is the constant true), `carries[h]` the carry out of
/// digit `h`.
#[derive(Clone, Debug, Default)]
pub struct DigitNode {
    pub digits: Vec<Vec<(u64, Atom)>>,
    pub carries: Vec<Option<Atom>>,
}

impl DigitNode {
    pub fn atom(&self, h: usize, v: u64) -> Option<Atom> {
        if v == 0 {
            return Some(Atom::True);
        }
        self.digits[h].iter().find(|p| p.0 == v).map(|p| p.1)
    }

    fn with_zero(&self, h: usize) -> Vec<(u64, Atom)> {
        std::iter::once((0, Atom::True)).chain(self.digits[h].iter().copied()).collect()
    }
}

/// The tree and node counters produced by the encoder.
#[derive(Clone, Debug)]
pub struct MtoLayout {
    pub base: Vec<u64>,
    pub tree: Tree,
    pub nodes: Vec<DigitNode>,
}

fn leaf_node(group: &[Term], base: &[u64], pool: &mut VarPool, sink: &mut ClauseSink) -> DigitNode {
    let digits_of: Vec<Vec<u64>> = group.iter().map(|t| decompose(t.coef, base)).collect();
    let mut node = DigitNode { digits: Vec::new(), carries: vec![None; base.len()] };
    for h in 0..=base.len() {
        let mut vals: Vec<u64> = digits_of.iter().map(|d| d[h]).filter(|&v| v > 0).collect();
        vals.sort_unstable();
        vals.dedup();
        let mut row = Vec::new();
        for v in vals {
            let hits: Vec<usize> = (0..group.len()).filter(|&i| digits_of[i][h] == v).collect();
            let atom: Atom = if hits.len() == 1 {
                group[hits[0]].var.into()
            } else {
                let y = pool.fresh();
                for i in hits {
                    sink.add([group[i].var.neg(), y.pos()]);
                }
                y.into()
            };
            row.push((v, atom));
        }
        node.digits.push(row);
    }
    node
}

/// Output value sets and carry existence of an inner node.
fn inner_shape(l: &DigitNode, r: &DigitNode, base: &[u64]) -> (Vec<Vec<u64>>, Vec<bool>) {
    let beta = base.len();
    let mut vals = Vec::with_capacity(beta + 1);
    let mut carries = Vec::with_capacity(beta);
    let mut carry_in = false;
    for h in 0..=beta {
        let a: Vec<u64> = std::iter::once(0).chain(l.digits[h].iter().map(|p| p.0)).collect();
        let b: Vec<u64> = std::iter::once(0).chain(r.digits[h].iter().map(|p| p.0)).collect();
        let mut out: Vec<u64> = Vec::new();
        let mut carry = false;
        for &i in &a {
            for &j in &b {
                for s in [Some(i + j), carry_in.then_some(i + j + 1)].into_iter().flatten() {
                    if h < beta {
                        let lam = base[h];
                        if s >= lam {
                            carry = true;
                        }
                        out.push(if s >= lam { s - lam } else { s });
                    } else {
                        out.push(s);
                    }
                }
            }
        }
        out.retain(|&v| v > 0);
        out.sort_unstable();
        out.dedup();
        vals.push(out);
        if h < beta {
            carries.push(carry);
            carry_in = carry;
        }
    }
    (vals, carries)
}

/// Clauses for the digit-wise sum of two children into `o`.
fn sum_clauses(l: &DigitNode, r: &DigitNode, o: &DigitNode, base: &[u64], sink: &mut ClauseSink) {
    let beta = base.len();
    let head = |h: usize, v: u64| o.atom(h, v).unwrap_or(Atom::True);
    for h in 0..=beta {
        let carry_in = if h > 0 { o.carries[h - 1] } else { None };
        let gamma = if h < beta { o.carries[h].unwrap_or(Atom::False) } else { Atom::False };
        for (i, a) in l.with_zero(h) {
            for (j, b) in r.with_zero(h) {
                let mut cases = vec![(Atom::False, i + j)];
                if let Some(c) = carry_in {
                    cases.push((!c, i + j + 1));
                }
                for (pre, s) in cases {
                    if h < beta {
                        let lam = base[h];
                        if s < lam {
                            sink.add([pre, !a, !b, head(h, s), gamma]);
                        } else {
                            sink.add([pre, !a, !b, gamma]);
                        }
                        if s > lam {
                            sink.add([pre, !a, !b, head(h, s - lam)]);
                        }
                    } else {
                        sink.add([pre, !a, !b, head(h, s)]);
                    }
                }
            }
        }
    }
}

/// The digit-wise `<= K` cascade at the root, stopped at the first digit
/// whose `K` value has no counter.
fn comparison_clauses(root: &DigitNode, kd: &[u64], sink: &mut ClauseSink) {
    let beta = kd.len() - 1;
    for &(v, a) in &root.digits[beta] {
        if v > kd[beta] {
            sink.add_unit(!a);
        }
    }
    let mut prefix: Vec<Atom> = Vec::new();
    for h in (1..=beta).rev() {
        match root.atom(h, kd[h]) {
            None => break,
            Some(a) => prefix.push(!a),
        }
        for &(v, a) in &root.digits[h - 1] {
            if v > kd[h - 1] {
                let mut c = prefix.clone();
                c.push(!a);
                sink.add(c);
            }
        }
    }
}

/// Encode with a balanced tree over the groups. `base` overrides the greedy
/// base selection.
pub fn encode_gmto_with(
    c: &PbAmo,
    base: Option<&[u64]>,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Option<MtoLayout> {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return None;
    }
    let base: Vec<u64> = match base {
        Some(b) => b.to_vec(),
        None => {
            let coefs: Vec<u64> = c.terms().map(|t| t.coef).collect();
            select_base(&coefs, c.k)
        }
    };
    assert!(base.iter().all(|&l| l >= 2), "radix digits must be at least 2");
    let kd = decompose(c.k, &base);
    let tree = balanced(c.groups.len());
    let root = tree.root();
    let mut nodes: Vec<DigitNode> = Vec::with_capacity(tree.nodes.len());
    for shape in &tree.nodes {
        let node = match *shape {
            Shape::Leaf(g) => leaf_node(&c.groups[g], &base, pool, sink),
            Shape::Inner(l, r) => {
                let (vals, carries) = inner_shape(&nodes[l], &nodes[r], &base);
                let mut node = DigitNode::default();
                for row in &vals {
                    let row = row.iter().map(|&v| (v, pool.fresh().into())).collect();
                    node.digits.push(row);
                }
                node.carries = carries.iter().map(|&e| e.then(|| pool.fresh().into())).collect();
                sum_clauses(&nodes[l], &nodes[r], &node, &base, sink);
                node
            }
        };
        nodes.push(node);
    }
    comparison_clauses(&nodes[root], &kd, sink);
    Some(MtoLayout { base, tree, nodes })
}

pub fn encode_gmto(c: &PbAmo, base: Option<&[u64]>, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_gmto_with(c, base, pool, sink);
}

pub fn encode_mto(c: &PbAmo, base: Option<&[u64]>, pool: &mut VarPool, sink: &mut ClauseSink) {
    encode_gmto_with(&c.flattened(), base, pool, sink);
}
