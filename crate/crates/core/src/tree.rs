//! Binary tree shapes over a list of leaves, and saturated value-set sums.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TreeHeuristic {
    /// Input order, height `ceil(log2 n)`, deeper leaves on the left.
    Balanced,
    /// Repeatedly merge the pair with the smallest ratio of resulting
    /// values to the product of the children's value counts.
    MinRatio,
}

impl FromStr for TreeHeuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "balanced" => Ok(TreeHeuristic::Balanced),
            "minratio" | "min-ratio" => Ok(TreeHeuristic::MinRatio),
            _ => Err(format!("unknown tree heuristic '{s}'")),
        }
    }
}

impl fmt::Display for TreeHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            TreeHeuristic::Balanced => "balanced",
            TreeHeuristic::MinRatio => "minratio",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf(usize),
    Inner(usize, usize),
}

/// Arena of nodes. Leaves carry the index of their input; the root is the
/// last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub nodes: Vec<Shape>,
}

impl Tree {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Shape::Leaf(_))).count()
    }

    pub fn depth_of(&self, node: usize) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            if let Shape::Inner(l, r) = self.nodes[id] {
                depth[l] = depth[id] + 1;
                depth[r] = depth[id] + 1;
            }
        }
        depth[node]
    }

    pub fn height(&self) -> usize {
        (0..self.nodes.len()).map(|i| self.depth_of(i)).max().unwrap_or(0)
    }

    /// Leaf inputs below `node`, left to right.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        match self.nodes[node] {
            Shape::Leaf(i) => vec![i],
            Shape::Inner(l, r) => {
                let mut v = self.leaves_under(l);
                v.extend(self.leaves_under(r));
                v
            }
        }
    }

    /// Nested-parenthesis rendering of the leaf inputs, e.g. `((0,1),2)`.
    pub fn render(&self) -> String {
        fn go(t: &Tree, id: usize, out: &mut String) {
            match t.nodes[id] {
                Shape::Leaf(i) => out.push_str(&i.to_string()),
                Shape::Inner(l, r) => {
                    out.push('(');
                    go(t, l, out);
                    out.push(',');
                    go(t, r, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, self.root(), &mut s);
        s
    }
}

/// Balanced tree over `n >= 1` leaves: the leftmost leaves are paired first
/// so that they sit one level deeper than the rest.
pub fn balanced(n: usize) -> Tree {
    assert!(n >= 1);
    let mut nodes: Vec<Shape> = (0..n).map(Shape::Leaf).collect();
    let mut level: Vec<usize> = (0..n).collect();
    if n > 1 {
        let half = n.next_power_of_two() / 2;
        let deep = 2 * (n - half);
        let mut next = Vec::new();
        let mut i = 0;
        while i < level.len() {
            if i < deep {
                nodes.push(Shape::Inner(level[i], level[i + 1]));
                next.push(nodes.len() - 1);
                i += 2;
            } else {
                next.push(level[i]);
                i += 1;
            }
        }
        level = next;
        while level.len() > 1 {
            let mut next = Vec::new();
            for p in level.chunks(2) {
                nodes.push(Shape::Inner(p[0], p[1]));
                next.push(nodes.len() - 1);
            }
            level = next;
        }
    }
    Tree { nodes }
}

/// Sorted set of `min(a + b, cap)` over both inputs.
pub fn saturated_sum(a: &[u64], b: &[u64], cap: u64) -> Vec<u64> {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let width = cap as usize + 1;
    let words = width.div_ceil(64);
    let mut bb = vec![0u64; words];
    for &y in b {
        let y = y.min(cap) as usize;
        bb[y / 64] |= 1 << (y % 64);
    }
    let bmax = b.iter().copied().max().unwrap_or(0);
    let mut out = vec![0u64; words];
    let mut over = false;
    for &x in a {
        if x + bmax >= cap {
            over = true;
        }
        if x >= cap {
            continue;
        }
        let (wo, bo) = ((x / 64) as usize, (x % 64) as u32);
        for w in 0..words - wo {
            let v = bb[w];
            if v == 0 {
                continue;
            }
            out[w + wo] |= v << bo;
            if bo > 0 && w + wo + 1 < words {
                out[w + wo + 1] |= v >> (64 - bo);
            }
        }
    }
    let mut res = Vec::new();
    for (w, &word) in out.iter().enumerate() {
        let mut m = word;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            let v = (w * 64 + t) as u64;
            if v < cap {
                res.push(v);
            }
            m &= m - 1;
        }
    }
    if over {
        res.push(cap);
    }
    res
}

/// Greedy bottom-up merging by smallest value ratio. Ties go to the smaller
/// merged set, then to the leftmost pair.
pub fn min_ratio(leaf_vals: &[Vec<u64>], cap: u64) -> Tree {
    let n = leaf_vals.len();
    assert!(n >= 1);
    let mut nodes: Vec<Shape> = (0..n).map(Shape::Leaf).collect();
    let mut forest: Vec<(usize, Vec<u64>)> =
        leaf_vals.iter().enumerate().map(|(i, v)| (i, v.clone())).collect();
    // cached merge results keyed by node ids
    let mut cache: std::collections::HashMap<(usize, usize), Vec<u64>> = Default::default();
    while forest.len() > 1 {
        let mut best: Option<(usize, usize, usize, usize)> = None; // i, j, |merged|, |a|*|b|
        for i in 0..forest.len() {
            for j in i + 1..forest.len() {
                let key = (forest[i].0, forest[j].0);
                let m = cache
                    .entry(key)
                    .or_insert_with(|| saturated_sum(&forest[i].1, &forest[j].1, cap))
                    .len();
                let prod = forest[i].1.len() * forest[j].1.len();
                let better = match best {
                    None => true,
                    Some((_, _, bm, bp)) => match (m * bp).cmp(&(bm * prod)) {
                        Ordering::Less => true,
                        Ordering::Equal => m < bm,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((i, j, m, prod));
                }
            }
        }
        let (i, j, _, _) = best.expect("at least one pair");
        let key = (forest[i].0, forest[j].0);
        let vals = cache.remove(&key).expect("cached");
        nodes.push(Shape::Inner(forest[i].0, forest[j].0));
        let id = nodes.len() - 1;
        forest.remove(j);
        forest[i] = (id, vals);
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_shapes() {
        assert_eq!(balanced(1).render(), "0");
        assert_eq!(balanced(3).render(), "((0,1),2)");
        assert_eq!(balanced(5).render(), "(((0,1),2),(3,4))");
        assert_eq!(balanced(6).render(), "(((0,1),(2,3)),(4,5))");
        assert_eq!(balanced(8).render(), "(((0,1),(2,3)),((4,5),(6,7)))");
        for n in 1..40 {
            let t = balanced(n);
            assert_eq!(t.height(), (n as f64).log2().ceil() as usize);
            assert_eq!(t.leaves_under(t.root()), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn saturated_sum_small() {
        assert_eq!(saturated_sum(&[0, 3, 6], &[0, 3, 6], 20), vec![0, 3, 6, 9, 12]);
        assert_eq!(saturated_sum(&[0, 20, 30], &[0, 20, 40], 56), vec![0, 20, 30, 40, 50, 56]);
        assert_eq!(saturated_sum(&[0, 70], &[0, 1], 130), vec![0, 1, 70, 71]);
    }

    #[test]
    fn saturated_sum_matches_naive() {
        let a: Vec<u64> = (0..200).map(|i| i * 7 % 301).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let b: Vec<u64> = (0..90).map(|i| i * 13 % 257).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let cap = 300;
        let mut naive: Vec<u64> = a.iter().flat_map(|x| b.iter().map(move |y| (x + y).min(cap))).collect();
        naive.sort();
        naive.dedup();
        assert_eq!(saturated_sum(&a, &b, cap), naive);
    }

    #[test]
    fn ratio_prefers_overlap() {
        let t = min_ratio(&[vec![0, 3, 6], vec![0, 3, 6], vec![0, 1, 2]], 100);
        assert_eq!(t.render(), "((0,1),2)");
    }

    #[test]
    fn ratio_on_interval_example() {
        let t = min_ratio(&[vec![0, 20, 30], vec![0, 20, 40], vec![0, 10, 20], vec![0, 1]], 56);
        assert_eq!(t.render(), "(((0,1),2),3)");
    }
}
