//! Decision procedures for Hopfian-type properties of abelian groups.
//!
//! Groups are described by a small expression language ([`dsl`]), normalized
//! ([`group_model`]) and classified by a rule engine with derivation traces
//! ([`classifier`]). Two independent oracles check the rules on finite groups
//! and on free groups of finite rank ([`oracle`], backed by
//! [`integer_linear`]), and [`constructions`] holds finite models of two
//! infinite-rank examples.

pub mod classifier;
pub mod constructions;
pub mod dsl;
pub mod group_model;
pub mod integer_linear;
pub mod mult;
pub mod oracle;
pub mod prime;
pub mod types_lattice;


pub use group_model::{normalize, GroupExpr, NormalForm};
pub use mult::Mult;
pub use prime::Prime;
pub use classifier::{classify, explain, Outcome, Property, Verdict};
