//! Ordered multiplicative representation functions and the combinatorics
//! around them.
//!
//! For an `h`-tuple of integer sets `(B_1, ..., B_h)` the representation
//! count `g(n)` is the number of ordered tuples `(b_1, ..., b_h)` with
//! `b_i ∈ B_i` and `b_1 ⋯ b_h = n`. This crate counts those tuples exactly,
//! ships the standard constructions realizing every achievable
//! (liminf, limsup) pair together with their closed forms, maps squarefree
//! integers to prime sets so factorizations become ordered set partitions,
//! and runs exact finite Ramsey searches (single, iterated and product
//! colorings) of the kind used to show representation counts are unbounded.

pub mod catalog;
pub mod error;
pub mod integer_sets;
pub mod primes;
pub mod ramsey;
pub mod repcount;
pub mod set_partitions;
pub mod squarefree_map;
pub mod witness;

pub use error::{Error, Result};
pub use integer_sets::{MultiplicativeSystem, PrimeClass, SetDescription};

pub use repcount::{RepWitness, WindowStats};
