//! Glue between random instances, encoders and the brute-force checks.

use rand::Rng;

use crate::amo::{encode_amo, AmoEncoding};
use crate::cnf::{ClauseSink, VarPool};
use crate::encoding::{encode_constraint, Encoding, Options};
use crate::gen::SmallInstance;
use crate::model::{ModelError, PbAmo};
use crate::prop::{check_cc, check_gac, check_models, Oracle, Report};

/// A fully encoded small instance with its oracle.
pub struct Case {
    pub oracle: Oracle,
    /// Normalization side clauses plus the PB encoding.
    pub pb: ClauseSink,
    /// `pb` together with the AMO clauses.
    pub cnf: ClauseSink,
    pub num_vars: u32,
    pub normalized: Vec<PbAmo>,
}

pub fn build_case(
    inst: &SmallInstance,
    enc: Encoding,
    opts: &Options,
    amo: AmoEncoding,
) -> Result<Case, ModelError> {
    let mut pool = VarPool::starting_at(inst.num_vars + 1);
    let mut pb = ClauseSink::new();
    let normalized = encode_constraint(&inst.constraint, &inst.groups, enc, opts, &mut pool, &mut pb)?;
    let mut cnf = pb.clone();
    for g in &inst.groups {
        encode_amo(g, amo, &mut pool, &mut cnf);
    }
    let vars = (1..=inst.num_vars).map(crate::cnf::Var::new).collect();
    let oracle = Oracle::new(vars, vec![inst.constraint.clone()], inst.groups.clone());
    Ok(Case { oracle, pb, cnf, num_vars: pool.num_vars().max(inst.num_vars), normalized })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckKind {
    Models,
    Gac,
    Cc,
}

impl std::str::FromStr for CheckKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "models" => Ok(CheckKind::Models),
            "gac" => Ok(CheckKind::Gac),
            "cc" => Ok(CheckKind::Cc),
            _ => Err(format!("unknown check '{s}'")),
        }
    }
}

pub fn run_check<R: Rng>(case: &Case, kind: CheckKind, samples: usize, rng: &mut R) -> Report {
    match kind {
        CheckKind::Models => check_models(&case.oracle, &case.cnf, case.num_vars),
        CheckKind::Gac => check_gac(&case.oracle, &case.cnf, case.num_vars, samples, rng),
        CheckKind::Cc => check_cc(&case.oracle, &case.cnf, case.num_vars, samples, rng),
    }
}
