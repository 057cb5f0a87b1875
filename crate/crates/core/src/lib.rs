//! Higher secant varieties by Terracini's lemma, tangential projections, contact-locus
//! dimension estimates and fiber probes, all in exact arithmetic.
//!
//! Dimension work runs over a large prime (2^31 - 1 by default) standing in for a
//! field of characteristic zero; fiber enumeration runs over small primes.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod contact;
pub mod error;
pub mod fiber;
pub mod rng;
pub mod secant;
pub mod varieties;

pub use error::{Error, Result};
