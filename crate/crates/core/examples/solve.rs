// Usage: cargo run --example solve
//
// Text format in, DIMACS out, answer checked against the problem.

use pbamo::io::{compile, parse_problem, CompileOptions};
use pbamo::sat::solve;
use pbamo::Encoding;

const PROBLEM: &str = "\
* pick one size per box, weights must fit
eo: a1 a2 a3 ;
eo: b1 b2 b3 ;
eo: c1 c2 ;
+3 a1 +5 a2 +8 a3 +2 b1 +6 b2 +9 b3 +4 c1 +7 c2 <= 14 ;
+1 a1 +1 b1 +1 c1 >= 2 ;
";

fn main() {
    let p = parse_problem(PROBLEM).unwrap();
    let opts = CompileOptions { encoding: Some(Encoding::Gmto), ..Default::default() };
    let c = compile(&p, &opts).unwrap();
    print!("{}", c.dimacs(Encoding::Gmto, true).lines().take(3).map(|l| format!("{l}\n")).collect::<String>());
    match solve(c.num_vars, &c.cnf) {
        None => println!("UNSAT"),
        Some(model) => {
            let on: Vec<&str> = c.names.iter().filter(|(v, _)| model[v.index() as usize]).map(|(_, n)| n.as_str()).collect();
            println!("SAT: {}", on.join(" "));
            println!("check: {:?}", p.check(&model));
        }
    }
}
