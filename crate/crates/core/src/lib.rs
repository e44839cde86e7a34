//! Computational core for elliptic divisibility denominators, prime sequences
//! selected by congruence and valuation conditions, a valuation-based model of
//! `(Z>=1, 1, +, B)`, and cyclotomic-subfield density tools.
//!
//! The crate is `no_std` (with `alloc`). IO, reports and the command line live
//! in the `dioph` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod curve;
pub mod cyclofield;
pub mod eds;
pub mod model;
pub mod primeseq;
pub mod zstruct;

mod error;

pub use error::{Error, Result};
