//! Text format, whole-problem compilation, DIMACS reading and the external
//! solver bridge.
//!
//! ```text
//! * comment
//! amo: x1 x2 x3 ;
//! eo: y1 y2 ;
//! +2 x1 -3 x2 +4 y1 <= 7 ;
//! ```
//! Variables not declared in a group form singleton groups.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::amo::{encode_alo, encode_amo, AmoEncoding};
use crate::cnf::{ClauseSink, Lit, Var, VarPool};
use crate::encoding::{Encoding, Options};
use crate::model::{amo_holds, normalize, Cmp, ModelError, PbConstraint, Trivial};
use crate::totalizer::NodeStats;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable '{name}' is already in another group")]
    SharedVariable { line: usize, name: String },
    #[error("line {line}: constraint has no terms")]
    EmptyConstraint { line: usize },
    #[error("line {line}: statement not terminated by ';'")]
    Unterminated { line: usize },
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub pool: VarPool,
    pub groups: Vec<Vec<Var>>,
    /// Whether group `i` was declared exactly-one.
    pub exactly_one: Vec<bool>,
    pub constraints: Vec<PbConstraint>,
}

impl Problem {
    pub fn num_vars(&self) -> u32 {
        self.pool.num_vars()
    }

    /// Does the assignment (indexed by variable, slot 0 unused) satisfy
    /// every constraint and group?
    pub fn check(&self, model: &[bool]) -> Result<(), String> {
        let val = |v: Var| model.get(v.index() as usize).copied().unwrap_or(false);
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.holds(val) {
                return Err(format!("constraint {} violated", i + 1));
            }
        }
        if !amo_holds(&self.groups, val) {
            return Err("at-most-one group violated".into());
        }
        for (g, &eo) in self.groups.iter().zip(&self.exactly_one) {
            if eo && !g.iter().any(|&v| val(v)) {
                return Err("exactly-one group has no true member".into());
            }
        }
        Ok(())
    }

    /// Enumerate every assignment that respects the groups. `None` when
    /// there are more than `limit` of them; otherwise a model if one exists.
    pub fn brute_force(&self, limit: u64) -> Option<Option<Vec<bool>>> {
        let n = self.num_vars() as usize;
        let mut grouped = vec![false; n + 1];
        let mut choices: Vec<(Vec<Var>, bool)> = Vec::new();
        for (g, &eo) in self.groups.iter().zip(&self.exactly_one) {
            for v in g {
                grouped[v.index() as usize] = true;
            }
            choices.push((g.clone(), eo));
        }
        for i in 1..=n {
            if !grouped[i] {
                choices.push((vec![Var::new(i as u32)], false));
            }
        }
        let radix: Vec<u64> = choices.iter().map(|(g, eo)| g.len() as u64 + u64::from(!eo)).collect();
        let mut total: u64 = 1;
        for &r in &radix {
            total = total.checked_mul(r).filter(|&t| t <= limit)?;
        }
        let mut digit = vec![0u64; radix.len()];
        for _ in 0..total {
            let mut model = vec![false; n + 1];
            for ((g, eo), &d) in choices.iter().zip(&digit) {
                let pick = if *eo { Some(d as usize) } else { (d as usize).checked_sub(1) };
                if let Some(j) = pick {
                    model[g[j].index() as usize] = true;
                }
            }
            if self.check(&model).is_ok() {
                return Some(Some(model));
            }
            for (d, &r) in digit.iter_mut().zip(&radix) {
                *d += 1;
                if *d < r {
                    break;
                }
                *d = 0;
            }
        }
        Some(None)
    }

    /// The AMO groups restricted to a constraint's variables.
    pub fn partition_for(&self, c: &PbConstraint) -> Vec<Vec<Var>> {
        let scope = c.vars();
        self.groups
            .iter()
            .map(|g| g.iter().copied().filter(|v| scope.contains(v)).collect::<Vec<_>>())
            .filter(|g| !g.is_empty())
            .collect()
    }
}

fn parse_int(tok: &str, line: usize) -> Result<i64, ParseError> {
    tok.parse::<i64>()
        .map_err(|_| ParseError::Syntax { line, msg: format!("expected an integer, found '{tok}'") })
}

fn parse_cmp(tok: &str) -> Option<Cmp> {
    match tok {
        "<=" => Some(Cmp::Le),
        "<" => Some(Cmp::Lt),
        ">=" => Some(Cmp::Ge),
        ">" => Some(Cmp::Gt),
        "=" | "==" => Some(Cmp::Eq),
        _ => None,
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_.[]#'".contains(c))
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut statements: Vec<(usize, Vec<String>)> = Vec::new();
    let mut cur: Vec<String> = Vec::new();
    let mut start = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.starts_with('*') || body.is_empty() {
            continue;
        }
        for piece in body.split_whitespace() {
            let mut rest = piece;
            while !rest.is_empty() {
                if cur.is_empty() {
                    start = line;
                }
                if let Some(i) = rest.find(';') {
                    if i > 0 {
                        cur.push(rest[..i].to_string());
                    }
                    statements.push((start, std::mem::take(&mut cur)));
                    rest = &rest[i + 1..];
                } else {
                    cur.push(rest.to_string());
                    rest = "";
                }
            }
        }
    }
    if !cur.is_empty() {
        return Err(ParseError::Unterminated { line: start });
    }

    let mut p = Problem { pool: VarPool::new(), groups: Vec::new(), exactly_one: Vec::new(), constraints: Vec::new() };
    let mut group_of: HashMap<Var, usize> = HashMap::new();
    for (line, toks) in statements {
        if toks.is_empty() {
            continue;
        }
        let head = toks[0].as_str();
        let decl = match head {
            "amo:" => Some(false),
            "eo:" => Some(true),
            _ => None,
        };
        if let Some(eo) = decl {
            let gi = p.groups.len();
            let mut g = Vec::new();
            for name in &toks[1..] {
                if !valid_name(name) {
                    return Err(ParseError::Syntax { line, msg: format!("bad variable name '{name}'") });
                }
                let v = p.pool.named(name);
                if group_of.insert(v, gi).is_some() {
                    return Err(ParseError::SharedVariable { line, name: name.clone() });
                }
                g.push(v);
            }
            p.groups.push(g);
            p.exactly_one.push(eo);
            continue;
        }
        let n = toks.len();
        if n < 2 {
            return Err(ParseError::Syntax { line, msg: "expected '<op> <rhs>'".into() });
        }
        let cmp = parse_cmp(&toks[n - 2])
            .ok_or_else(|| ParseError::Syntax { line, msg: format!("expected a comparison, found '{}'", toks[n - 2]) })?;
        let rhs = parse_int(&toks[n - 1], line)?;
        let body = &toks[..n - 2];
        if body.is_empty() {
            return Err(ParseError::EmptyConstraint { line });
        }
        if body.len() % 2 != 0 {
            return Err(ParseError::Syntax { line, msg: "terms must be '<coef> <var>' pairs".into() });
        }
        let mut terms = Vec::new();
        for pair in body.chunks(2) {
            let q = parse_int(&pair[0], line)?;
            if !valid_name(&pair[1]) {
                return Err(ParseError::Syntax { line, msg: format!("bad variable name '{}'", pair[1]) });
            }
            terms.push((q, p.pool.named(&pair[1])));
        }
        p.constraints.push(PbConstraint::new(terms, cmp, rhs));
    }
    Ok(p)
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    pub encoding: Option<Encoding>,
    pub amo: AmoEncoding,
    pub options: Options,
    /// Count AMO/ALO clauses and variables in the reported statistics.
    pub include_amo_stats: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub vars: u32,
    pub clauses: usize,
    pub gen_ms: f64,
}

pub struct Compiled {
    pub cnf: ClauseSink,
    pub num_vars: u32,
    pub names: Vec<(Var, String)>,
    pub stats: Stats,
    /// Per-node rows of the totalizer family, tagged with the constraint
    /// index.
    pub tree_stats: Vec<(usize, NodeStats)>,
}

impl Compiled {
    pub fn dimacs(&self, encoding: Encoding, with_stats: bool) -> String {
        let mut s = String::new();
        if with_stats {
            s.push_str(&format!(
                "c stats encoding={} vars={} clauses={} gen_ms={:.3}\n",
                encoding, self.stats.vars, self.stats.clauses, self.stats.gen_ms
            ));
        }
        s.push_str(&self.cnf.to_dimacs_string(self.num_vars));
        s
    }

    /// `name index` per named variable.
    pub fn var_map(&self) -> String {
        self.names.iter().map(|(v, n)| format!("{n} {v}\n")).collect()
    }
}

pub fn compile(p: &Problem, opts: &CompileOptions) -> Result<Compiled, ModelError> {
    let encoding = opts.encoding.unwrap_or(Encoding::Rggt);
    let mut pool = p.pool.clone();
    let base = pool.num_vars();
    let mut pb = ClauseSink::new();
    let start = Instant::now();
    let mut tree_stats = Vec::new();
    for (i, c) in p.constraints.iter().enumerate() {
        let part = p.partition_for(c);
        for n in normalize(c, &part, &mut pool, &mut pb)? {
            if n.trivial == Trivial::None {
                for row in crate::encoding::encode_traced(&n, encoding, &opts.options, &mut pool, &mut pb) {
                    tree_stats.push((i, row));
                }
            }
        }
    }
    let pb_vars = pool.num_vars() - base;
    let pb_clauses = pb.num_clauses();
    let gen_ms = start.elapsed().as_secs_f64() * 1000.0;
    let mut cnf = pb;
    let mut side = ClauseSink::new();
    for (g, &eo) in p.groups.iter().zip(&p.exactly_one) {
        encode_amo(g, opts.amo, &mut pool, &mut side);
        if eo {
            encode_alo(g, &mut side);
        }
    }
    let side_clauses = side.num_clauses();
    cnf.append(side);
    let stats = if opts.include_amo_stats {
        Stats { vars: pool.num_vars() - base, clauses: pb_clauses + side_clauses, gen_ms }
    } else {
        Stats { vars: pb_vars, clauses: pb_clauses, gen_ms }
    };
    Ok(Compiled { cnf, num_vars: pool.num_vars(), names: p.pool.names().to_vec(), stats, tree_stats })
}

/// Read a DIMACS CNF. Returns the declared variable count and the clauses.
pub fn parse_dimacs(text: &str) -> Result<(u32, ClauseSink), String> {
    let mut sink = ClauseSink::new();
    let mut declared = None;
    let mut cur: Vec<Lit> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if let Some(rest) = t.strip_prefix("p cnf") {
            let nums: Vec<u32> = rest.split_whitespace().filter_map(|x| x.parse().ok()).collect();
            declared = nums.first().copied();
            continue;
        }
        for tok in t.split_whitespace() {
            let v: i32 = tok.parse().map_err(|_| format!("bad literal '{tok}'"))?;
            if v == 0 {
                if cur.is_empty() {
                    sink.add_empty();
                } else {
                    sink.add(cur.drain(..));
                }
            } else {
                cur.push(Lit::from_dimacs(v));
            }
        }
    }
    if !cur.is_empty() {
        sink.add(cur);
    }
    Ok((declared.ok_or("missing 'p cnf' header")?, sink))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolverOutcome {
    /// Model indexed by variable, slot 0 unused.
    Sat(Vec<bool>),
    Unsat,
    Unknown(String),
}

/// Run `<cmd> <cnf_path>` through the shell and read the competition
/// output (`s ...` and `v ...` lines).
pub fn run_solver(cmd: &str, cnf_path: &Path, timeout: Duration) -> std::io::Result<SolverOutcome> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(format!("{} '{}'", cmd, cnf_path.display()))
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()?;
    let mut stdout = child.stdout.take().expect("piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let start = Instant::now();
    let status = loop {
        if let Some(st) = child.try_wait()? {
            break Some(st);
        }
        if start.elapsed() > timeout {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let out = reader.join().unwrap_or_default();
    if status.is_none() {
        return Ok(SolverOutcome::Unknown("timeout".into()));
    }
    Ok(parse_solver_output(&out, status.and_then(|s| s.code())))
}

pub fn parse_solver_output(out: &str, code: Option<i32>) -> SolverOutcome {
    let mut answer = None;
    let mut lits: Vec<i32> = Vec::new();
    for line in out.lines() {
        let t = line.trim();
        if let Some(s) = t.strip_prefix("s ") {
            answer = Some(s.trim().to_string());
        } else if let Some(v) = t.strip_prefix("v ") {
            lits.extend(v.split_whitespace().filter_map(|x| x.parse::<i32>().ok()).filter(|&x| x != 0));
        }
    }
    let answer = answer.unwrap_or_else(|| match code {
        Some(10) => "SATISFIABLE".into(),
        Some(20) => "UNSATISFIABLE".into(),
        _ => "UNKNOWN".into(),
    });
    match answer.as_str() {
        "SATISFIABLE" => {
            let n = lits.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
            let mut m = vec![false; n + 1];
            for l in lits {
                if l > 0 {
                    m[l as usize] = true;
                }
            }
            SolverOutcome::Sat(m)
        }
        "UNSATISFIABLE" => SolverOutcome::Unsat,
        other => SolverOutcome::Unknown(other.to_string()),
    }
}

/// Competition-format answer from the bundled CDCL solver.
pub fn solve_dimacs(text: &str) -> Result<String, String> {
    let (n, sink) = parse_dimacs(text)?;
    Ok(match crate::sat::solve(n, &sink) {
        Some(m) => {
            let mut s = String::from("s SATISFIABLE\nv");
            for (i, &b) in m.iter().enumerate().skip(1) {
                s.push_str(&format!(" {}", if b { i as i64 } else { -(i as i64) }));
            }
            s.push_str(" 0\n");
            s
        }
        None => "s UNSATISFIABLE\n".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_groups_and_constraints() {
        let p = parse_problem("* demo\namo: a b c ;\neo: d e ;\n+2 a -3 b +1 d\n  <= 7 ;\n").unwrap();
        assert_eq!(p.groups.len(), 2);
        assert_eq!(p.exactly_one, vec![false, true]);
        assert_eq!(p.constraints[0].rhs, 7);
        assert_eq!(p.constraints[0].terms[1].0, -3);
        assert_eq!(p.num_vars(), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_problem("amo: a b ;\namo: b c ;"), Err(ParseError::SharedVariable { line: 2, .. })));
        assert!(matches!(parse_problem("<= 3 ;"), Err(ParseError::EmptyConstraint { line: 1 })));
        assert!(matches!(parse_problem("+2 a <= 3"), Err(ParseError::Unterminated { line: 1 })));
        assert!(matches!(parse_problem("+2 a ~ 3 ;"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn brute_force_respects_groups() {
        let p = parse_problem("eo: a b ;\neo: c d ;\n+3 a +1 b +3 c +1 d >= 4 ;\n+1 a +1 c <= 1 ;").unwrap();
        let m = p.brute_force(100).unwrap().unwrap();
        assert!(p.check(&m).is_ok());
        let q = parse_problem("eo: a b ;\n+1 a +1 b <= 0 ;").unwrap();
        assert_eq!(q.brute_force(100), Some(None));
        assert_eq!(q.brute_force(1), None);
    }

    #[test]
    fn solver_output() {
        assert_eq!(parse_solver_output("s SATISFIABLE\nv 1 -2\nv 3 0\n", None), SolverOutcome::Sat(vec![false, true, false, true]));
        assert_eq!(parse_solver_output("", Some(20)), SolverOutcome::Unsat);
    }

    #[test]
    fn builtin_solver_round_trip() {
        let out = solve_dimacs("p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
        assert_eq!(parse_solver_output(&out, None), SolverOutcome::Sat(vec![false, false, true]));
        assert_eq!(solve_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap(), "s UNSATISFIABLE\n");
    }
}
