// Usage: cargo run --example amo

use pbamo::amo::{encode_alo, encode_amo, AmoEncoding};
use pbamo::{ClauseSink, VarPool};

fn main() {
    for n in [3, 5, 6, 9, 16] {
        for enc in [AmoEncoding::Pairwise, AmoEncoding::Ladder, AmoEncoding::TwoProduct, AmoEncoding::Auto] {
            let mut pool = VarPool::new();
            let xs = pool.reserve_block(n);
            let mut sink = ClauseSink::new();
            encode_amo(&xs, enc, &mut pool, &mut sink);
            encode_alo(&xs, &mut sink);
            println!("n={n:2} {enc:12} aux {:2} clauses {:3}", pool.num_vars() as usize - n, sink.num_clauses());
        }
    }
}
