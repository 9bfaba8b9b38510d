// Usage: cargo run --example totalizers
//
// Value trees, interval reduction and the per-node table that
// `pbamo compile --tree-stats` writes.

use pbamo::totalizer::{encode_ggt_with, encode_rggt_with, reduce};
use pbamo::tree::TreeHeuristic;
use pbamo::{ClauseSink, PbAmo, Var, VarPool};

fn main() {
    let x: Vec<Var> = (1..=7).map(Var::new).collect();
    let c = PbAmo::from_groups(
        vec![
            vec![(20, x[0]), (30, x[1])],
            vec![(20, x[2]), (40, x[3])],
            vec![(10, x[4]), (20, x[5])],
            vec![(1, x[6])],
        ],
        55,
    );
    let (reduced, _, passes) = reduce(&c, TreeHeuristic::Balanced);
    println!("{passes} reduction passes, {} groups left", reduced.groups.len());

    let mut pool = VarPool::starting_at(8);
    let mut sink = ClauseSink::new();
    let rows = encode_rggt_with(&c, TreeHeuristic::Balanced, &mut pool, &mut sink);
    println!("rggt: {} fresh vars, {} clauses", pool.num_vars() - 7, sink.num_clauses());
    println!("node depth leaf vals intervals vars");
    for r in &rows {
        println!("{:4} {:5} {:4} {:4} {:9} {:4}", r.node, r.depth, r.leaf, r.vals, r.intervals, r.vars);
    }

    let mut pool = VarPool::starting_at(8);
    let mut sink = ClauseSink::new();
    encode_ggt_with(&c, TreeHeuristic::Balanced, &mut pool, &mut sink);
    println!("ggt: {} fresh vars, {} clauses", pool.num_vars() - 7, sink.num_clauses());
}
