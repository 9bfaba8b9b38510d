//! CNF encodings of pseudo-Boolean constraints `sum q*x <= K` whose
//! variables are partitioned into at-most-one groups.
//!
//! The usual path is [`model::normalize`] followed by
//! [`encoding::encode`]; [`io::compile`] does both for a whole problem file.

pub mod amo;
pub mod cnf;
pub mod counter;
pub mod dd;
pub mod encoding;
pub mod gen;
pub mod harness;
pub mod io;
pub mod model;
pub mod modulo;
pub mod prop;
pub mod sat;
pub mod totalizer;
pub mod tree;
pub mod watchdog;

pub use cnf::{Atom, ClauseSink, Lit, Var, VarPool};
pub use encoding::{encode, encode_constraint, Encoding, Guarantee, Options};
pub use model::{normalize, Cmp, PbAmo, PbConstraint, Term, Trivial};
