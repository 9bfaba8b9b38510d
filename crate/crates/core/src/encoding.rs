//! Encoding selection and the per-constraint compile step.

use std::fmt;
use std::str::FromStr;

use crate::cnf::{ClauseSink, Var, VarPool};
use crate::dd::{encode_bdd, encode_mdd, GroupOrder};
use crate::model::{normalize, ModelError, PbAmo, PbConstraint, Trivial};
use crate::tree::TreeHeuristic;
use crate::{counter, modulo, totalizer, watchdog};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Encoding {
    Bdd,
    Mdd,
    Swc,
    Gswc,
    Gt,
    Ggt,
    Gtd,
    Ggtd,
    Rgt,
    Rggt,
    Mto,
    Gmto,
    Gpw,
    Ggpw,
    Lpw,
    Glpw,
}

/// Propagation strength promised for PB(AMO) constraints when combined
/// with a propagation-complete AMO encoding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Guarantee {
    /// Unit propagation finds every implied literal.
    Gac,
    /// Unit propagation detects every conflict.
    ConflictOnly,
    None,
}

impl Encoding {
    pub const ALL: [Encoding; 16] = [
        Encoding::Bdd,
        Encoding::Mdd,
        Encoding::Swc,
        Encoding::Gswc,
        Encoding::Gt,
        Encoding::Ggt,
        Encoding::Gtd,
        Encoding::Ggtd,
        Encoding::Rgt,
        Encoding::Rggt,
        Encoding::Mto,
        Encoding::Gmto,
        Encoding::Gpw,
        Encoding::Ggpw,
        Encoding::Lpw,
        Encoding::Glpw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Bdd => "bdd",
            Encoding::Mdd => "mdd",
            Encoding::Swc => "swc",
            Encoding::Gswc => "gswc",
            Encoding::Gt => "gt",
            Encoding::Ggt => "ggt",
            Encoding::Gtd => "gtd",
            Encoding::Ggtd => "ggtd",
            Encoding::Rgt => "rgt",
            Encoding::Rggt => "rggt",
            Encoding::Mto => "mto",
            Encoding::Gmto => "gmto",
            Encoding::Gpw => "gpw",
            Encoding::Ggpw => "ggpw",
            Encoding::Lpw => "lpw",
            Encoding::Glpw => "glpw",
        }
    }

    /// Whether the encoding exploits the AMO groups.
    pub fn uses_groups(self) -> bool {
        matches!(
            self,
            Encoding::Mdd
                | Encoding::Gswc
                | Encoding::Ggt
                | Encoding::Ggtd
                | Encoding::Rggt
                | Encoding::Gmto
                | Encoding::Ggpw
                | Encoding::Glpw
        )
    }

    /// The group-aware encoding and its plain counterpart.
    pub fn pairs() -> [(Encoding, Encoding); 8] {
        [
            (Encoding::Mdd, Encoding::Bdd),
            (Encoding::Gswc, Encoding::Swc),
            (Encoding::Ggt, Encoding::Gt),
            (Encoding::Ggtd, Encoding::Gtd),
            (Encoding::Rggt, Encoding::Rgt),
            (Encoding::Gmto, Encoding::Mto),
            (Encoding::Ggpw, Encoding::Gpw),
            (Encoding::Glpw, Encoding::Lpw),
        ]
    }

    pub fn guarantee(self) -> Guarantee {
        match self {
            Encoding::Mto | Encoding::Gmto => Guarantee::None,
            Encoding::Gpw | Encoding::Ggpw => Guarantee::ConflictOnly,
            _ => Guarantee::Gac,
        }
    }

    pub fn default_tree(self) -> TreeHeuristic {
        match self {
            Encoding::Gtd | Encoding::Ggtd => TreeHeuristic::Balanced,
            _ => TreeHeuristic::MinRatio,
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Encoding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.to_ascii_lowercase();
        Encoding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown encoding '{s}'"))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    /// Tree heuristic for the totalizer family; `None` uses the encoding's
    /// default.
    pub tree: Option<TreeHeuristic>,
    /// Mixed-radix base for the modulo family; `None` picks one.
    pub base: Option<Vec<u64>>,
    pub order: GroupOrder,
}

/// Encode an already normalized constraint.
pub fn encode(c: &PbAmo, enc: Encoding, opts: &Options, pool: &mut VarPool, sink: &mut ClauseSink) {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return;
    }
    let tree = opts.tree.unwrap_or(enc.default_tree());
    let base = opts.base.as_deref();
    match enc {
        Encoding::Bdd => encode_bdd(c, opts.order, pool, sink),
        Encoding::Mdd => encode_mdd(c, opts.order, pool, sink),
        Encoding::Swc => counter::encode_swc(c, pool, sink),
        Encoding::Gswc => counter::encode_gswc(c, pool, sink),
        Encoding::Gt | Encoding::Gtd => totalizer::encode_gt(c, tree, pool, sink),
        Encoding::Ggt | Encoding::Ggtd => totalizer::encode_ggt(c, tree, pool, sink),
        Encoding::Rgt => totalizer::encode_rgt(c, tree, pool, sink),
        Encoding::Rggt => totalizer::encode_rggt(c, tree, pool, sink),
        Encoding::Mto => modulo::encode_mto(c, base, pool, sink),
        Encoding::Gmto => modulo::encode_gmto(c, base, pool, sink),
        Encoding::Gpw => watchdog::encode_gpw(c, pool, sink),
        Encoding::Ggpw => watchdog::encode_ggpw(c, pool, sink),
        Encoding::Lpw => watchdog::encode_lpw(c, pool, sink),
        Encoding::Glpw => watchdog::encode_glpw(c, pool, sink),
    }
}

/// Like [`encode`], returning per-node statistics for the totalizer
/// family (empty for the others).
pub fn encode_traced(
    c: &PbAmo,
    enc: Encoding,
    opts: &Options,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Vec<totalizer::NodeStats> {
    if c.trivial != Trivial::None || c.groups.len() < 2 {
        return Vec::new();
    }
    let tree = opts.tree.unwrap_or(enc.default_tree());
    match enc {
        Encoding::Gt | Encoding::Gtd => totalizer::encode_ggt_with(&c.flattened(), tree, pool, sink),
        Encoding::Ggt | Encoding::Ggtd => totalizer::encode_ggt_with(c, tree, pool, sink),
        Encoding::Rgt => totalizer::encode_rggt_with(&c.flattened(), tree, pool, sink),
        Encoding::Rggt => totalizer::encode_rggt_with(c, tree, pool, sink),
        _ => {
            encode(c, enc, opts, pool, sink);
            Vec::new()
        }
    }
}

/// Normalize and encode one constraint. Everything except the AMO clauses
/// of the partition goes to `sink`.
pub fn encode_constraint(
    c: &PbConstraint,
    partition: &[Vec<Var>],
    enc: Encoding,
    opts: &Options,
    pool: &mut VarPool,
    sink: &mut ClauseSink,
) -> Result<Vec<PbAmo>, ModelError> {
    let parts = normalize(c, partition, pool, sink)?;
    for p in &parts {
        encode(p, enc, opts, pool, sink);
    }
    Ok(parts)
}
