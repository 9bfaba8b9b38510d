//! PB constraints with AMO groups, and the normalization pipeline that turns
//! any linear constraint into `sum q*x <= K` with positive coefficients.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{Atom, ClauseSink, Var, VarPool};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

impl Cmp {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Cmp::Le => lhs <= rhs,
            Cmp::Lt => lhs < rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Eq => "=",
        }
    }
}

/// A linear constraint over Boolean variables, before normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct PbConstraint {
    pub terms: Vec<(i64, Var)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl PbConstraint {
    pub fn new(terms: Vec<(i64, Var)>, cmp: Cmp, rhs: i64) -> PbConstraint {
        PbConstraint { terms, cmp, rhs }
    }

    pub fn le(terms: Vec<(i64, Var)>, rhs: i64) -> PbConstraint {
        PbConstraint::new(terms, Cmp::Le, rhs)
    }

    /// `value(v)` gives the truth value of a variable.
    pub fn holds(&self, value: impl Fn(Var) -> bool) -> bool {
        let lhs: i64 = self.terms.iter().filter(|(_, v)| value(*v)).map(|(q, _)| q).sum();
        self.cmp.holds(lhs, self.rhs)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for &(_, v) in &self.terms {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

/// True iff at most one variable of every group is true.
pub fn amo_holds(groups: &[Vec<Var>], value: impl Fn(Var) -> bool) -> bool {
    groups.iter().all(|g| g.iter().filter(|&&v| value(v)).count() <= 1)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Term {
    pub coef: u64,
    pub var: Var,
}

impl Term {
    pub fn new(coef: u64, var: Var) -> Term {
        Term { coef, var }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Trivial {
    None,
    AlwaysTrue,
    AlwaysFalse,
}

/// A normalized PB(AMO) constraint: `sum q*x <= k`, every coefficient in
/// `1..=k`, at most one true variable per group, distinct coefficients
/// within a group, at least two groups and `sum of group maxima > k`,
/// unless `trivial` says otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct PbAmo {
    pub groups: Vec<Vec<Term>>,
    pub k: u64,
    pub trivial: Trivial,
}

impl PbAmo {
    /// Build directly from groups of (coefficient, variable), trusting the
    /// caller that the result is already normalized.
    pub fn from_groups(groups: Vec<Vec<(u64, Var)>>, k: u64) -> PbAmo {
        let groups = groups
            .into_iter()
            .map(|g| g.into_iter().map(|(q, v)| Term::new(q, v)).collect())
            .collect();
        PbAmo { groups, k, trivial: Trivial::None }
    }

    pub fn num_terms(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn max_coef(&self) -> u64 {
        self.terms().map(|t| t.coef).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.groups.iter().flatten()
    }

    pub fn group_max(&self, i: usize) -> u64 {
        self.groups[i].iter().map(|t| t.coef).max().unwrap_or(0)
    }

    pub fn sum_of_maxima(&self) -> u64 {
        (0..self.groups.len()).map(|i| self.group_max(i)).sum()
    }

    /// The same constraint with every term in its own group.
    pub fn flattened(&self) -> PbAmo {
        PbAmo {
            groups: self.terms().map(|t| vec![*t]).collect(),
            k: self.k,
            trivial: self.trivial,
        }
    }

    pub fn holds(&self, value: impl Fn(Var) -> bool) -> bool {
        match self.trivial {
            Trivial::AlwaysTrue => return true,
            Trivial::AlwaysFalse => return false,
            Trivial::None => {}
        }
        let s: u64 = self.terms().filter(|t| value(t.var)).map(|t| t.coef).sum();
        s <= self.k
    }

    pub fn group_vars(&self) -> Vec<Vec<Var>> {
        self.groups.iter().map(|g| g.iter().map(|t| t.var).collect()).collect()
    }

    /// Back to the raw form, e.g. to normalize again.
    pub fn to_constraint(&self) -> (PbConstraint, Vec<Vec<Var>>) {
        let terms = self.terms().map(|t| (t.coef as i64, t.var)).collect();
        (PbConstraint::le(terms, self.k as i64), self.group_vars())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("variable {0} appears in more than one AMO group")]
    VarInTwoGroups(Var),
    #[error("coefficient arithmetic overflowed")]
    Overflow,
}

/// Working form between normalization steps: `sum q*x <= k` with signed
/// coefficients, grouped.
#[derive(Clone, Debug, PartialEq)]
pub struct Draft {
    pub groups: Vec<Vec<(i64, Var)>>,
    pub k: i64,
}

/// Split by comparison into one or two `<=` drafts and attach the
/// partition. Variables not covered by `partition` become singleton groups;
/// groups are restricted to the constraint's scope.
pub fn to_drafts(c: &PbConstraint, partition: &[Vec<Var>]) -> Result<Vec<Draft>, ModelError> {
    let mut coef: HashMap<Var, i64> = HashMap::new();
    let mut order: Vec<Var> = Vec::new();
    for &(q, v) in &c.terms {
        let e = coef.entry(v).or_insert_with(|| {
            order.push(v);
            0
        });
        *e = e.checked_add(q).ok_or(ModelError::Overflow)?;
    }
    let mut seen: HashMap<Var, usize> = HashMap::new();
    let mut groups: Vec<Vec<Var>> = Vec::new();
    for (gi, g) in partition.iter().enumerate() {
        let mut members = Vec::new();
        for &v in g {
            if let Some(&other) = seen.get(&v) {
                if other != gi {
                    return Err(ModelError::VarInTwoGroups(v));
                }
                continue;
            }
            seen.insert(v, gi);
            if coef.contains_key(&v) {
                members.push(v);
            }
        }
        if !members.is_empty() {
            groups.push(members);
        }
    }
    for &v in &order {
        if !seen.contains_key(&v) {
            groups.push(vec![v]);
        }
    }
    let le = |sign: i64, k: i64| Draft {
        groups: groups.iter().map(|g| g.iter().map(|v| (sign * coef[v], *v)).collect()).collect(),
        k,
    };
    let rhs = c.rhs;
    Ok(match c.cmp {
        Cmp::Le => vec![le(1, rhs)],
        Cmp::Lt => vec![le(1, rhs - 1)],
        Cmp::Ge => vec![le(-1, -rhs)],
        Cmp::Gt => vec![le(-1, -rhs - 1)],
        Cmp::Eq => vec![le(1, rhs), le(-1, -rhs)],
    })
}

/// Make every group non-negative. For a group whose least coefficient is
/// `q < 0`, add `-q` to all its coefficients and to `k`, and add a fresh
/// `y <-> (no member true)` with coefficient `-q`.
pub fn rewrite_negatives(d: &mut Draft, pool: &mut VarPool, sink: &mut ClauseSink) {
    for g in d.groups.iter_mut() {
        let qmin = g.iter().map(|&(q, _)| q).min().unwrap_or(0);
        if qmin >= 0 {
            continue;
        }
        let shift = -qmin;
        let y = pool.fresh();
        let mut long: Vec<Atom> = vec![y.into()];
        for &(_, x) in g.iter() {
            sink.add([x.neg(), y.neg()]);
            long.push(x.into());
        }
        sink.add(long);
        for t in g.iter_mut() {
            t.0 += shift;
        }
        d.k += shift;
        g.push((shift, y));
    }
}

/// What the pipeline ends in.
pub enum Outcome {
    Done(Trivial),
    Continue,
}

/// Negative `k` is a contradiction; `k = 0` forbids every positive term.
pub fn settle_small_rhs(d: &mut Draft, sink: &mut ClauseSink) -> Outcome {
    if d.k < 0 {
        sink.add_empty();
        d.groups.clear();
        return Outcome::Done(Trivial::AlwaysFalse);
    }
    if d.k == 0 {
        for &(q, x) in d.groups.iter().flatten() {
            if q > 0 {
                sink.add_unit(x.neg());
            }
        }
        d.groups.clear();
        return Outcome::Done(Trivial::AlwaysTrue);
    }
    Outcome::Continue
}

pub fn drop_zero_terms(d: &mut Draft) {
    for g in d.groups.iter_mut() {
        g.retain(|&(q, _)| q != 0);
    }
    d.groups.retain(|g| !g.is_empty());
}

/// A term whose coefficient exceeds `k` is false in every model.
pub fn drop_oversized(d: &mut Draft, sink: &mut ClauseSink) {
    let k = d.k;
    for g in d.groups.iter_mut() {
        g.retain(|&(q, x)| {
            if q > k {
                sink.add_unit(x.neg());
                false
            } else {
                true
            }
        });
    }
    d.groups.retain(|g| !g.is_empty());
}

/// Fewer than two groups, or group maxima that cannot exceed `k` together,
/// leave nothing to encode.
pub fn always_true(d: &Draft) -> bool {
    if d.groups.len() <= 1 {
        return true;
    }
    let s: i64 = d.groups.iter().map(|g| g.iter().map(|t| t.0).max().unwrap_or(0)).sum();
    s <= d.k
}

/// Replace members of a group sharing a coefficient by one fresh variable
/// implied by each of them.
pub fn merge_equal_coefficients(d: &mut Draft, pool: &mut VarPool, sink: &mut ClauseSink) {
    for g in d.groups.iter_mut() {
        let mut out: Vec<(i64, Var)> = Vec::new();
        let mut done: Vec<i64> = Vec::new();
        for i in 0..g.len() {
            let q = g[i].0;
            if done.contains(&q) {
                continue;
            }
            done.push(q);
            let same: Vec<Var> = g.iter().filter(|t| t.0 == q).map(|t| t.1).collect();
            if same.len() == 1 {
                out.push((q, same[0]));
            } else {
                let y = pool.fresh();
                for x in same {
                    sink.add([x.neg(), y.pos()]);
                }
                out.push((q, y));
            }
        }
        *g = out;
    }
}

fn finish(d: Draft, trivial: Trivial) -> PbAmo {
    let groups = if trivial == Trivial::None {
        d.groups
            .into_iter()
            .map(|g| g.into_iter().map(|(q, v)| Term::new(q as u64, v)).collect())
            .collect()
    } else {
        Vec::new()
    };
    PbAmo { groups, k: d.k.max(0) as u64, trivial }
}

/// Run the whole pipeline on one `<=` draft.
pub fn normalize_draft(mut d: Draft, pool: &mut VarPool, sink: &mut ClauseSink) -> PbAmo {
    rewrite_negatives(&mut d, pool, sink);
    if let Outcome::Done(t) = settle_small_rhs(&mut d, sink) {
        return finish(d, t);
    }
    drop_zero_terms(&mut d);
    drop_oversized(&mut d, sink);
    if always_true(&d) {
        return finish(d, Trivial::AlwaysTrue);
    }
    merge_equal_coefficients(&mut d, pool, sink);
    finish(d, Trivial::None)
}

/// Normalize a constraint under an AMO partition. Side clauses (variable
/// definitions, units, the empty clause) go to `sink`. Equalities yield two
/// results.
pub fn normalize(
    c: &PbConstraint,
    partition: &[Vec<Var>],
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Result<Vec<PbAmo>, ModelError> {
    let drafts = to_drafts(c, partition)?;
    Ok(drafts.into_iter().map(|d| normalize_draft(d, pool, sink)).collect())
}
