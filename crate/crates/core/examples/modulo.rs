// Usage: cargo run --example modulo [base digits...]
//
//     cargo run --example modulo 4 3

use pbamo::modulo::{decompose, encode_gmto_with, select_base};
use pbamo::{ClauseSink, PbAmo, Var, VarPool};

fn main() {
    let q = [2u64, 3, 4, 5, 3, 4, 6, 8];
    let x: Vec<Var> = (1..=8).map(Var::new).collect();
    let c = PbAmo::from_groups(vec![(0..4).map(|i| (q[i], x[i])).collect(), (4..8).map(|i| (q[i], x[i])).collect()], 10);

    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let base = if args.is_empty() { select_base(&q, 10) } else { args };
    println!("base {base:?}");
    for (i, &v) in q.iter().enumerate() {
        println!("  x{} = {v:2} -> digits {:?}", i + 1, decompose(v, &base));
    }
    println!("  K  = 10 -> digits {:?}", decompose(10, &base));

    let mut pool = VarPool::starting_at(9);
    let mut sink = ClauseSink::new();
    let lay = encode_gmto_with(&c, Some(&base), &mut pool, &mut sink).expect("two groups");
    for (id, node) in lay.nodes.iter().enumerate() {
        let vals: Vec<Vec<u64>> = node.digits.iter().map(|d| d.iter().map(|p| p.0).collect()).collect();
        println!("node {id:2} {:?} values {vals:?}", lay.tree.nodes[id]);
    }
    println!("gmto: {} fresh vars, {} clauses", pool.num_vars() - 8, sink.num_clauses());
}
