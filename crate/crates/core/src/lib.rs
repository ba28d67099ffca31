//! Regular-language quantum states.
//!
//! A regular language `L` over the alphabet `{0, .., d-1}` defines the family of
//! states `|L_N> = sum_{w in L, |w| = N} |w>`. This crate builds those states from
//! regular expressions and automata, decides whether a binary matrix product state
//! is such a family, decides translational invariance, computes the unique
//! canonical decomposition of a language, and decides local-unitary equivalence of
//! sparse languages. Every decision procedure has a brute-force oracle next to it.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod automata;
pub mod canonical;
pub mod catalog;
pub mod corpus;
mod error;
pub mod exact;
pub mod lang;
pub mod mps;
pub mod peps2d;
pub mod sparse_lu;

pub use error::{Error, Result};
