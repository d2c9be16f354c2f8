//! Compact Fenwick trees and a dynamic rank/select bit vector built on them.
//!
//! A Fenwick tree stores a list of bounded naturals and answers prefix sums,
//! predecessor searches on prefix sums (plus the complemented search needed
//! for selection on zeros), point updates, and push/pop — all in logarithmic
//! time. This crate provides six interchangeable tree variants combining two
//! node orders (classical Fenwick order and level order) with three storage
//! widths (one word per node, whole-byte compression, bit compression), all
//! behind the [`tree::FenwickTree`] trait and verified against a naive
//! reference implementation.
//!
//! On top of the trees, [`bitvec::DynBitVec`] partitions a growable bit
//! sequence into fixed-size blocks and indexes per-block popcounts with a
//! Fenwick tree, giving rank and select over ones and zeros, bit updates and
//! push/pop with a space overhead of a few percent.
//!
//! The [`apps`] module implements two classic uses — counting the
//! transpositions generating a permutation and preferential-attachment graph
//! generation — and [`bench`] provides a measurement harness with
//! dead-code-sink and argument-chaining safeguards plus exact space
//! accounting.

pub mod apps;
pub mod bench;
pub mod bits;
pub mod bitstore;
pub mod bitvec;
pub mod error;
pub mod rng;
pub mod tree;

pub use error::{Error, Result};
pub use tree::{AnyFenwick, BackendKind, FenwickInit, FenwickTree, FindResult, NaiveFenwick};
