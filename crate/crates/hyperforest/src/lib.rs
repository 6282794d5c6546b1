//! Exact symbolic machinery for spanning-hyperforest generating functions.
//!
//! The crate has two independent computational routes that the test suites
//! compare against each other, term by term:
//!
//! * a Grassmann route: a finite anticommuting algebra over pairs of
//!   generators per vertex, with exact Berezin integration ([`grassmann`],
//!   [`operators`], [`integrals`], [`osp`]);
//! * a combinatorial route: brute-force enumeration of spanning
//!   subhypergraphs, hyperforest classification and weighted sums
//!   ([`hypergraph`], [`potts`], [`matrixtree`]).
//!
//! Every coefficient lives in the sparse multivariate polynomial ring over
//! arbitrary-precision rationals provided by [`ring`]; all equalities are
//! exact, nothing is ever rounded.

pub mod grassmann;
pub mod hypergraph;
pub mod integrals;
pub mod matrixtree;
pub mod operators;
pub mod osp;
pub mod potts;
pub mod ring;
pub mod rng;

pub use ring::{Monomial, Polynomial, Symbol};
