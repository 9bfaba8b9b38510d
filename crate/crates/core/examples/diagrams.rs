// Usage: cargo run --example diagrams
//
// Decision diagrams for a grouped constraint: the MDD branches once per
// group, the BDD once per variable.

use pbamo::dd::{encode_bdd, GroupOrder, Mdd};
use pbamo::{ClauseSink, PbAmo, Var, VarPool};

fn main() {
    let x: Vec<Var> = (1..=6).map(Var::new).collect();
    let c = PbAmo::from_groups(
        vec![
            vec![(2, x[0]), (3, x[1]), (4, x[2])],
            vec![(2, x[3]), (3, x[4]), (4, x[5])],
        ],
        7,
    );
    let mdd = Mdd::build(&c, GroupOrder::Input);
    println!("mdd nodes: {}", mdd.num_nodes());
    println!("x3 and x6 true: {}", mdd.eval(|v| v == x[2] || v == x[5]));
    println!("x3 and x5 true: {}", mdd.eval(|v| v == x[2] || v == x[4]));

    let mut pool = VarPool::starting_at(7);
    let mut sink = ClauseSink::new();
    mdd.encode(&mut pool, &mut sink);
    println!("mdd: {} vars, {} clauses", pool.num_vars() - 6, sink.num_clauses());

    let mut pool = VarPool::starting_at(7);
    let mut sink = ClauseSink::new();
    encode_bdd(&c, GroupOrder::Input, &mut pool, &mut sink);
    println!("bdd: {} vars, {} clauses", pool.num_vars() - 6, sink.num_clauses());
}
