// Usage: cargo run --example propagation [seed]
//
// Samples partial assignments and compares unit propagation with the
// brute-force oracle, per encoding.

use pbamo::amo::AmoEncoding;
use pbamo::gen::random_small;
use pbamo::harness::{build_case, run_check, CheckKind};
use pbamo::{Cmp, Encoding, Guarantee, Options};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for enc in Encoding::ALL {
        let kind = match enc.guarantee() {
            Guarantee::Gac => CheckKind::Gac,
            Guarantee::ConflictOnly => CheckKind::Cc,
            Guarantee::None => CheckKind::Models,
        };
        let (mut cases, mut misses) = (0, 0);
        for _ in 0..60 {
            let inst = random_small(&mut rng, 8, enc.uses_groups());
            if inst.constraint.cmp == Cmp::Eq {
                continue;
            }
            let case = build_case(&inst, enc, &Options::default(), AmoEncoding::Pairwise).unwrap();
            let r = run_check(&case, kind, 5, &mut rng);
            cases += r.cases;
            misses += r.failures;
        }
        println!("{enc:5} {kind:?}: {cases} cases, {misses} misses");
    }
}
