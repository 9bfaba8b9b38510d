// Usage: cargo run --example counters

use pbamo::counter::{encode_gswc, encode_swc};
use pbamo::{ClauseSink, PbAmo, Var, VarPool};

fn main() {
    let x: Vec<Var> = (1..=9).map(Var::new).collect();
    let groups = x.chunks(3).enumerate().map(|(i, g)| g.iter().enumerate().map(|(j, &v)| ((i + j + 1) as u64 * 2, v)).collect()).collect();
    let c = PbAmo::from_groups(groups, 11);
    for (name, f) in [("swc", encode_swc as fn(&PbAmo, &mut VarPool, &mut ClauseSink)), ("gswc", encode_gswc)] {
        let mut pool = VarPool::starting_at(10);
        let mut sink = ClauseSink::new();
        f(&c, &mut pool, &mut sink);
        println!("{name:5} {:3} vars {:4} clauses", pool.num_vars() - 9, sink.num_clauses());
    }
}
