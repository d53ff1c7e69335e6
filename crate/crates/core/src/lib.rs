//! Exact and certified arithmetic for comparing the class numbers of the
//! arithmetically equivalent octic fields `Q(a^(1/8))` and `Q((16a)^(1/8))`.
//!
//! The crate is `no_std` and only needs an allocator. File formats, JSON
//! output and the command line live in the `zetatwin` companion crate.
//!
//! Module map:
//!
//! * [`field`]: exact arithmetic in `Q[X]/(X^8 - a)`, norms, characteristic
//!   polynomials and the unit test.
//! * [`parse`]: polynomial-expression parser and canonical printer.
//! * [`modp`]: splitting types, degree-one evaluation characters, quadratic
//!   residue bits and rank over `F_2`.
//! * [`ball`]: dyadic midpoint-radius arithmetic with outward rounding.
//! * [`analytic`]: certified roots, logarithmic embeddings, regulators and
//!   rational recovery.
//! * [`gassmann`]: the affine group of `Z/8` and the induced-character test.
//! * [`prover`]: the proof chain and its [`prover::Certificate`].

#![no_std]

extern crate alloc;

pub mod analytic;
pub mod ball;
mod error;
pub mod field;
pub mod gassmann;
pub mod modp;
pub mod parse;
pub mod prover;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
