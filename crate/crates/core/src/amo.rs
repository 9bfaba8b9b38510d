//! At-most-one and at-least-one clauses.

use std::fmt;
use std::str::FromStr;

use crate::cnf::{ClauseSink, Var, VarPool};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum AmoEncoding {
    Pairwise,
    Ladder,
    TwoProduct,
    /// Pairwise up to five variables, ladder beyond.
    #[default]
    Auto,
}

impl FromStr for AmoEncoding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pairwise" => Ok(AmoEncoding::Pairwise),
            "ladder" | "regular" => Ok(AmoEncoding::Ladder),
            "two-product" | "product" => Ok(AmoEncoding::TwoProduct),
            "auto" => Ok(AmoEncoding::Auto),
            _ => Err(format!("unknown AMO encoding '{s}'")),
        }
    }
}

impl fmt::Display for AmoEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AmoEncoding::Pairwise => "pairwise",
            AmoEncoding::Ladder => "ladder",
            AmoEncoding::TwoProduct => "two-product",
            AmoEncoding::Auto => "auto",
        };
        f.pad(s)
    }
}

pub fn encode_amo(xs: &[Var], enc: AmoEncoding, pool: &mut VarPool, sink: &mut ClauseSink) {
    if xs.len() <= 1 {
        return;
    }
    match enc {
        AmoEncoding::Pairwise => pairwise(xs, sink),
        AmoEncoding::Ladder => ladder(xs, pool, sink),
        AmoEncoding::TwoProduct => two_product(xs, pool, sink),
        AmoEncoding::Auto if xs.len() <= 5 => pairwise(xs, sink),
        AmoEncoding::Auto => ladder(xs, pool, sink),
    }
}

pub fn encode_alo(xs: &[Var], sink: &mut ClauseSink) {
    sink.add(xs.iter().map(|v| v.pos()));
}

fn pairwise(xs: &[Var], sink: &mut ClauseSink) {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            sink.add([xs[i].neg(), xs[j].neg()]);
        }
    }
}

// y_i: some of x_1..x_i is true
fn ladder(xs: &[Var], pool: &mut VarPool, sink: &mut ClauseSink) {
    let n = xs.len();
    let y = pool.reserve_block(n - 1);
    for i in 0..n - 1 {
        sink.add([xs[i].neg(), y[i].pos()]);
        sink.add([y[i].neg(), xs[i + 1].neg()]);
        if i + 1 < n - 1 {
            sink.add([y[i].neg(), y[i + 1].pos()]);
        }
    }
}

fn two_product(xs: &[Var], pool: &mut VarPool, sink: &mut ClauseSink) {
    let n = xs.len();
    let rows = (n as f64).sqrt().ceil() as usize;
    let cols = n.div_ceil(rows);
    let u = pool.reserve_block(rows);
    let v = pool.reserve_block(cols);
    for (k, x) in xs.iter().enumerate() {
        sink.add([x.neg(), u[k / cols].pos()]);
        sink.add([x.neg(), v[k % cols].pos()]);
    }
    pairwise(&u, sink);
    pairwise(&v, sink);
}
