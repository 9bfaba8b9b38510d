use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pbamo::amo::AmoEncoding;
use pbamo::encoding::{Encoding, Options};
use pbamo::gen::{generate_mmkp, random_small, size_report, MmkpParams};
use pbamo::harness::{build_case, run_check, CheckKind};
use pbamo::io::{compile, parse_problem, run_solver, solve_dimacs, CompileOptions, Compiled, Problem, SolverOutcome};
use pbamo::prop::Report;
use pbamo::tree::TreeHeuristic;

#[derive(Parser)]
#[command(name = "pbamo", version, about = "Compile PB constraints with at-most-one groups to CNF")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the DIMACS CNF of a problem file.
    Compile(CompileArgs),
    /// Check encodings against the brute-force oracle on random instances.
    Check(CheckArgs),
    /// Print a generated knapsack instance in the text format.
    Gen(GenArgs),
    /// Encoding sizes on generated instances, as CSV.
    Bench(BenchArgs),
    /// Compile, run a SAT solver and report the answer.
    Solve(SolveArgs),
    /// Solve a DIMACS file with the bundled CDCL solver, competition output.
    Sat { file: PathBuf },
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, short, default_value = "rggt")]
    encoding: Encoding,
    #[arg(long, default_value = "auto")]
    amo_encoding: AmoEncoding,
    /// balanced | minratio (totalizer family only)
    #[arg(long)]
    tree: Option<TreeHeuristic>,
    /// Mixed-radix base such as `4,3` (modulo family only)
    #[arg(long, value_delimiter = ',')]
    base: Option<Vec<u64>>,
}

impl EncodeArgs {
    fn options(&self) -> Result<CompileOptions> {
        let e = self.encoding;
        let tree_family = matches!(
            e,
            Encoding::Gt | Encoding::Ggt | Encoding::Gtd | Encoding::Ggtd | Encoding::Rgt | Encoding::Rggt
        );
        if self.tree.is_some() && !tree_family {
            bail!("--tree does not apply to encoding {e}");
        }
        if let Some(b) = &self.base {
            if !matches!(e, Encoding::Mto | Encoding::Gmto) {
                bail!("--base does not apply to encoding {e}");
            }
            if b.is_empty() || b.iter().any(|&l| l < 2) {
                bail!("every radix in --base must be at least 2");
            }
        }
        Ok(CompileOptions {
            encoding: Some(e),
            amo: self.amo_encoding,
            options: Options { tree: self.tree, base: self.base.clone(), ..Options::default() },
            include_amo_stats: false,
        })
    }
}

#[derive(Args)]
struct CompileArgs {
    file: PathBuf,
    #[command(flatten)]
    enc: EncodeArgs,
    /// Output file; a `<out>.map` sidecar with the variable names is written next to it.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Prepend a `c stats ...` line.
    #[arg(long)]
    stats: bool,
    /// Count AMO clauses and variables in the stats.
    #[arg(long)]
    include_amo_stats: bool,
    /// Per-node CSV for the totalizer family.
    #[arg(long)]
    tree_stats: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "check", default_value = "models")]
    kind: CheckKind,
    /// Encoding name or `all`.
    #[arg(long, short, default_value = "all")]
    encoding: String,
    #[arg(long, default_value = "pairwise")]
    amo_encoding: AmoEncoding,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Partial assignments per instance for gac/cc.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    max_vars: u32,
    /// Allow negative coefficients and any comparison.
    #[arg(long)]
    general: bool,
    #[arg(long, env = "PBAMO_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "mmkp1")]
    preset: String,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, env = "PBAMO_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated encoding names or `all`.
    #[arg(long, default_value = "all")]
    encodings: String,
    #[arg(long, default_value = "mmkp1")]
    preset: String,
    #[arg(long, default_value_t = 0.4)]
    scale: f64,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, env = "PBAMO_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    include_amo_stats: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[command(flatten)]
    enc: EncodeArgs,
    /// Solver command; the CNF path is appended. Defaults to the bundled CDCL solver.
    #[arg(long)]
    solver: Option<String>,
    /// Check the model against the problem, and an UNSAT answer by enumeration when small.
    #[arg(long)]
    validate: bool,
    #[arg(long, default_value_t = 60)]
    timeout: u64,
}

fn parse_encodings(s: &str) -> Result<Vec<Encoding>> {
    if s == "all" {
        return Ok(Encoding::ALL.to_vec());
    }
    s.split(',').map(|e| e.trim().parse::<Encoding>().map_err(anyhow::Error::msg)).collect()
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Problem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("parsing {}", path.display()))
}

fn tree_csv(c: &Compiled) -> String {
    let mut s = String::from("constraint,node,depth,leaf,vals,intervals,vars\n");
    for (i, r) in &c.tree_stats {
        s.push_str(&format!("{},{},{},{},{},{},{}\n", i, r.node, r.depth, r.leaf, r.vals, r.intervals, r.vars));
    }
    s
}

fn cmd_compile(a: &CompileArgs) -> Result<ExitCode> {
    let p = load(&a.file)?;
    let mut opts = a.enc.options()?;
    opts.include_amo_stats = a.include_amo_stats;
    let c = compile(&p, &opts)?;
    write_out(a.out.as_deref(), &c.dimacs(a.enc.encoding, a.stats))?;
    if let Some(out) = &a.out {
        let mut map = out.clone().into_os_string();
        map.push(".map");
        fs::write(&map, c.var_map())?;
    }
    if let Some(t) = &a.tree_stats {
        fs::write(t, tree_csv(&c))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(a: &CheckArgs) -> Result<ExitCode> {
    let encodings = parse_encodings(&a.encoding)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let instances: Vec<_> = (0..a.instances).map(|_| random_small(&mut rng, a.max_vars, a.general)).collect();
    let mut all_ok = true;
    for enc in encodings {
        let mut total = Report::default();
        for inst in &instances {
            let case = build_case(inst, enc, &Options::default(), a.amo_encoding)?;
            total.merge(&run_check(&case, a.kind, a.samples, &mut rng));
        }
        all_ok &= total.ok();
        println!(
            "{:<5} {:?} cases={} failures={}{}",
            enc.name(),
            a.kind,
            total.cases,
            total.failures,
            total.first_failure.map(|f| format!(" first: {f}")).unwrap_or_default()
        );
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn preset(name: &str, scale: f64) -> Result<MmkpParams> {
    let p = MmkpParams::preset(name).with_context(|| format!("unknown preset '{name}'"))?;
    Ok(if scale == 1.0 { p } else { p.scaled(scale) })
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode> {
    let p = preset(&a.preset, a.scale)?;
    let inst = generate_mmkp(&p, &mut ChaCha8Rng::seed_from_u64(a.seed));
    write_out(a.out.as_deref(), &inst.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: &BenchArgs) -> Result<ExitCode> {
    let encodings = parse_encodings(&a.encodings)?;
    let p = preset(&a.preset, a.scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut csv = String::from("instance,encoding,vars,clauses,gen_ms\n");
    for i in 0..a.instances {
        let inst = generate_mmkp(&p, &mut rng);
        for r in size_report(&inst, &encodings, &Options::default(), a.include_amo_stats) {
            csv.push_str(&format!("{},{},{:.1},{:.1},{:.3}\n", i, r.encoding, r.vars, r.clauses, r.millis));
        }
    }
    write_out(a.out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(a: &SolveArgs) -> Result<ExitCode> {
    let p = load(&a.file)?;
    let c = compile(&p, &a.enc.options()?)?;
    let dimacs = c.dimacs(a.enc.encoding, false);
    let outcome = match &a.solver {
        Some(cmd) => {
            let dir = tempfile::tempdir()?;
            let path = dir.path().join("problem.cnf");
            fs::write(&path, &dimacs)?;
            run_solver(cmd, &path, Duration::from_secs(a.timeout))?
        }
        None => pbamo::io::parse_solver_output(&solve_dimacs(&dimacs).map_err(anyhow::Error::msg)?, None),
    };
    let mut ok = true;
    match &outcome {
        SolverOutcome::Sat(m) => {
            println!("s SATISFIABLE");
            let mut line = String::from("v");
            for (v, name) in &c.names {
                let val = m.get(v.index() as usize).copied().unwrap_or(false);
                line.push_str(&format!(" {}{}", if val { "" } else { "-" }, name));
            }
            println!("{line}");
            if a.validate {
                match p.check(m) {
                    Ok(()) => println!("c validate: model satisfies the problem"),
                    Err(e) => {
                        println!("c validate: FAILED {e}");
                        ok = false;
                    }
                }
            }
        }
        SolverOutcome::Unsat => {
            println!("s UNSATISFIABLE");
            if a.validate {
                match p.brute_force(1 << 22) {
                    Some(Some(_)) => {
                        println!("c validate: FAILED the problem has a model");
                        ok = false;
                    }
                    Some(None) => println!("c validate: no model exists"),
                    None => println!("c validate: too large to enumerate"),
                }
            }
        }
        SolverOutcome::Unknown(why) => {
            println!("s UNKNOWN");
            println!("c {why}");
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_sat(file: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let out = solve_dimacs(&text).map_err(anyhow::Error::msg)?;
    print!("{out}");
    Ok(ExitCode::from(if out.starts_with("s SAT") { 10 } else { 20 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Compile(a) => cmd_compile(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Sat { file } => cmd_sat(file),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
