// Usage: cargo run --example normalize
//
// 4 x1 - 7 x2 + 9 x3 + 12 x4 <= 15 with groups {x1,x2} {x3,x4}.

use pbamo::{normalize, ClauseSink, PbConstraint, Var, VarPool};

fn main() {
    let x: Vec<Var> = (1..=4).map(Var::new).collect();
    let c = PbConstraint::le(vec![(4, x[0]), (-7, x[1]), (9, x[2]), (12, x[3])], 15);
    let groups = vec![vec![x[0], x[1]], vec![x[2], x[3]]];
    let mut pool = VarPool::starting_at(5);
    let mut side = ClauseSink::new();
    let out = normalize(&c, &groups, &mut pool, &mut side).unwrap();
    for n in &out {
        println!("k = {}", n.k);
        for g in &n.groups {
            let terms: Vec<String> = g.iter().map(|t| format!("{} x{}", t.coef, t.var)).collect();
            println!("  group: {}", terms.join(" + "));
        }
    }
    println!("side clauses:");
    for cl in side.clauses() {
        println!("  {:?}", cl.iter().map(|l| l.dimacs()).collect::<Vec<_>>());
    }

    // an equality becomes two halves
    let eq = PbConstraint::new(vec![(2, x[0]), (3, x[2])], pbamo::Cmp::Eq, 3);
    let halves = normalize(&eq, &[vec![x[0]], vec![x[2]]], &mut pool, &mut side).unwrap();
    println!("2 x1 + 3 x3 = 3 -> {} parts", halves.len());
}
