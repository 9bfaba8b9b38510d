//! Instance generators: multi-choice knapsack families and small random
//! PB(AMO) constraints for fuzzing, plus the per-encoding size report.

use std::time::Instant;

use rand::Rng;

use crate::cnf::{ClauseSink, Var, VarPool};
use crate::encoding::{encode_constraint, Encoding, Options};
use crate::model::{Cmp, PbConstraint};

/// Parameters of an MMKP family. Each instance picks one of `families`
/// capacity means spread evenly over `k_range`; every constraint's
/// capacity is drawn within 10% of that mean.
#[derive(Clone, Debug, PartialEq)]
pub struct MmkpParams {
    pub constraints: usize,
    pub groups: usize,
    pub group_size: usize,
    pub max_coef: u64,
    pub k_range: (u64, u64),
    pub families: u64,
}

impl MmkpParams {
    pub fn preset(name: &str) -> Option<MmkpParams> {
        let p = |l, n, m, q, k_range, families| MmkpParams {
            constraints: l,
            groups: n,
            group_size: m,
            max_coef: q,
            k_range,
            families,
        };
        match name {
            "mmkp1" => Some(p(10, 15, 10, 1000, (1000, 14000), 100)),
            "mmkp2" => Some(p(10, 15, 10, 60, (100, 800), 100)),
            "mmkp3" => Some(p(50, 15, 5, 10, (65, 100), 36)),
            _ => None,
        }
    }

    /// Shrink groups, group size and constraint count by `f`; capacities
    /// follow the number of groups.
    pub fn scaled(&self, f: f64) -> MmkpParams {
        let s = |v: usize, min: usize| ((v as f64 * f).round() as usize).max(min);
        let groups = s(self.groups, 2);
        let ratio = groups as f64 / self.groups as f64;
        let k = |v: u64| ((v as f64 * ratio).round() as u64).max(1);
        MmkpParams {
            constraints: s(self.constraints, 1),
            groups,
            group_size: s(self.group_size, 2),
            max_coef: self.max_coef,
            k_range: (k(self.k_range.0), k(self.k_range.1)),
            families: self.families,
        }
    }
}

/// `constraints[k] = (coefs, capacity)` with `coefs[i * group_size + j]`
/// for item `j` of group `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mmkp {
    pub groups: usize,
    pub group_size: usize,
    pub constraints: Vec<(Vec<u64>, u64)>,
}

pub fn generate_mmkp<R: Rng>(p: &MmkpParams, rng: &mut R) -> Mmkp {
    let family = rng.gen_range(0..p.families.max(1));
    let (lo, hi) = p.k_range;
    let mean = if p.families <= 1 { lo } else { lo + (hi - lo) * family / (p.families - 1) };
    let spread = mean / 10;
    let n = p.groups * p.group_size;
    let constraints = (0..p.constraints)
        .map(|_| {
            let coefs = (0..n).map(|_| rng.gen_range(1..=p.max_coef)).collect();
            (coefs, rng.gen_range(mean - spread..=mean + spread))
        })
        .collect();
    Mmkp { groups: p.groups, group_size: p.group_size, constraints }
}

impl Mmkp {
    pub fn var_name(i: usize, j: usize) -> String {
        format!("x{}_{}", i + 1, j + 1)
    }

    pub fn num_vars(&self) -> usize {
        self.groups * self.group_size
    }

    /// Register the item variables in a pool, group by group.
    pub fn vars(&self, pool: &mut VarPool) -> Vec<Vec<Var>> {
        (0..self.groups)
            .map(|i| (0..self.group_size).map(|j| pool.named(&Mmkp::var_name(i, j))).collect())
            .collect()
    }

    pub fn pb_constraints(&self, groups: &[Vec<Var>]) -> Vec<PbConstraint> {
        let flat: Vec<Var> = groups.iter().flatten().copied().collect();
        self.constraints
            .iter()
            .map(|(coefs, k)| PbConstraint::le(coefs.iter().zip(&flat).map(|(&q, &v)| (q as i64, v)).collect(), *k as i64))
            .collect()
    }

    /// The instance in the text format: one exactly-one declaration per
    /// group and one line per knapsack constraint.
    pub fn to_text(&self) -> String {
        let mut s = format!("* mmkp groups={} size={}\n", self.groups, self.group_size);
        for i in 0..self.groups {
            s.push_str("eo:");
            for j in 0..self.group_size {
                s.push(' ');
                s.push_str(&Mmkp::var_name(i, j));
            }
            s.push_str(" ;\n");
        }
        for (coefs, k) in &self.constraints {
            for (idx, q) in coefs.iter().enumerate() {
                let (i, j) = (idx / self.group_size, idx % self.group_size);
                if idx > 0 {
                    s.push(' ');
                }
                s.push_str(&format!("+{} {}", q, Mmkp::var_name(i, j)));
            }
            s.push_str(&format!(" <= {k} ;\n"));
        }
        s
    }
}

/// A small random constraint over variables `1..=num_vars` with a random
/// partition into consecutive groups of size 1 to 4.
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub num_vars: u32,
    pub constraint: PbConstraint,
    pub groups: Vec<Vec<Var>>,
}

/// With `general`, coefficients may be zero or negative and any comparison
/// may appear; otherwise the constraint is `<=` with positive coefficients.
pub fn random_small<R: Rng>(rng: &mut R, max_vars: u32, general: bool) -> SmallInstance {
    let n = rng.gen_range(2..=max_vars.max(2));
    let vars: Vec<Var> = (1..=n).map(Var::new).collect();
    let mut groups = Vec::new();
    let mut i = 0;
    while i < vars.len() {
        let size = rng.gen_range(1..=4).min(vars.len() - i);
        groups.push(vars[i..i + size].to_vec());
        i += size;
    }
    let mut terms = Vec::new();
    for &v in &vars {
        let q: i64 = if general && rng.gen_bool(0.3) { rng.gen_range(-20..=3) } else { rng.gen_range(1..=20) };
        terms.push((q, v));
    }
    let max_sum: i64 = groups
        .iter()
        .map(|g| g.iter().map(|v| terms[v.index() as usize - 1].0).max().unwrap_or(0).max(0))
        .sum();
    let (cmp, rhs) = if general {
        let cmp = [Cmp::Le, Cmp::Lt, Cmp::Ge, Cmp::Gt, Cmp::Eq][rng.gen_range(0..5)];
        (cmp, rng.gen_range(-10..=max_sum + 5))
    } else {
        (Cmp::Le, rng.gen_range(0..=max_sum + 2))
    };
    SmallInstance { num_vars: n, constraint: PbConstraint::new(terms, cmp, rhs), groups }
}

/// Size of one encoding on one instance, averaged per PB constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeRow {
    pub encoding: Encoding,
    pub vars: f64,
    pub clauses: f64,
    pub millis: f64,
}

/// Encode every knapsack constraint of `inst` with each encoding. AMO
/// clauses are left out unless `include_amo`.
pub fn size_report(inst: &Mmkp, encodings: &[Encoding], opts: &Options, include_amo: bool) -> Vec<SizeRow> {
    let mut rows = Vec::new();
    for &enc in encodings {
        let (mut vars, mut clauses, mut ms) = (0u64, 0u64, 0f64);
        for k in 0..inst.constraints.len() {
            let mut pool = VarPool::new();
            let groups = inst.vars(&mut pool);
            let base = pool.num_vars();
            let c = &inst.pb_constraints(&groups)[k];
            let mut sink = ClauseSink::new();
            let start = Instant::now();
            encode_constraint(c, &groups, enc, opts, &mut pool, &mut sink).expect("generated instances are valid");
            if include_amo {
                for g in &groups {
                    crate::amo::encode_amo(g, crate::amo::AmoEncoding::Auto, &mut pool, &mut sink);
                    crate::amo::encode_alo(g, &mut sink);
                }
            }
            ms += start.elapsed().as_secs_f64() * 1000.0;
            vars += u64::from(pool.num_vars() - base);
            clauses += sink.num_clauses() as u64;
        }
        let l = inst.constraints.len().max(1) as f64;
        rows.push(SizeRow { encoding: enc, vars: vars as f64 / l, clauses: clauses as f64 / l, millis: ms / l });
    }
    rows
}
