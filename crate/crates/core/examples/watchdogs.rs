// Usage: cargo run --example watchdogs

use pbamo::watchdog::{encode_ggpw, encode_glpw_with, encode_gpw, encode_lpw, params};
use pbamo::{ClauseSink, PbAmo, Var, VarPool};

fn main() {
    let x: Vec<Var> = (1..=12).map(Var::new).collect();
    let q = [5u64, 9, 14, 3, 11, 7, 2, 13, 6, 10, 4, 8];
    let groups = (0..4).map(|g| (0..3).map(|j| (q[g * 3 + j], x[g * 3 + j])).collect()).collect();
    let c = PbAmo::from_groups(groups, 23);
    println!("bits, offset, shifted K: {:?}", params(14, 23));

    type Enc = fn(&PbAmo, &mut VarPool, &mut ClauseSink);
    for (name, f) in [("gpw", encode_gpw as Enc), ("ggpw", encode_ggpw), ("lpw", encode_lpw)] {
        let mut pool = VarPool::starting_at(13);
        let mut sink = ClauseSink::new();
        f(&c, &mut pool, &mut sink);
        println!("{name:5} {:4} vars {:5} clauses", pool.num_vars() - 12, sink.num_clauses());
    }
    let mut pool = VarPool::starting_at(13);
    let mut sink = ClauseSink::new();
    let shared = encode_glpw_with(&c, &mut pool, &mut sink).expect("non-trivial");
    println!(
        "glpw  {:4} vars {:5} clauses ({} shared totalizer nodes, {} merges)",
        pool.num_vars() - 12,
        sink.num_clauses(),
        shared.num_totalizer_nodes(),
        shared.num_merges()
    );
}
