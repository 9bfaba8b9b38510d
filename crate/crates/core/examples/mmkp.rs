// Usage: cargo run --release --example mmkp [preset] [scale]

use pbamo::gen::{generate_mmkp, size_report, MmkpParams};
use pbamo::{Encoding, Options};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "mmkp1".into());
    let scale: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.4);
    let p = MmkpParams::preset(&preset).expect("mmkp1, mmkp2 or mmkp3").scaled(scale);
    println!("{p:?}");
    let inst = generate_mmkp(&p, &mut ChaCha8Rng::seed_from_u64(7));
    println!("{} vars, {} knapsack rows", inst.num_vars(), inst.constraints.len());
    println!("encoding  vars/pb  clauses/pb");
    for r in size_report(&inst, &Encoding::ALL, &Options::default(), false) {
        println!("{:8} {:8.0} {:11.0}", r.encoding, r.vars, r.clauses);
    }
}
