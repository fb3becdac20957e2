//! Bounded model checking of word-level transition systems through quadratic
//! unconstrained binary optimization (QUBO).
//!
//! The pipeline is:
//!
//! ```text
//! RISC-U assembly --beator--> BTOR2 subset --unroll--> QUBO --solve--> input witness
//! ```
//!
//! A bad state of the transition system is reachable within `n` transitions
//! exactly when the QUBO produced by [`unroll::translate`] has ground energy 0.
//! Every stage has a concrete-execution counterpart ([`btor2::sim`] for models,
//! [`beator::emulate`] for programs) that the tests use as an oracle.
//!
//! Bit vectors are always little-endian in this crate: bit 0 of a [`bitblast::Word`]
//! is the least significant bit.

pub mod beator;
pub mod bitblast;
pub mod bqm;
pub mod btor2;
pub mod cli;
pub mod solve;
pub mod unroll;

pub use bqm::{BinaryQuadraticModel, Bit, GateKind, VarId};
pub use btor2::{Nid, TransitionModel};
pub use unroll::{translate, UnrollOptions, UnrolledModel};
