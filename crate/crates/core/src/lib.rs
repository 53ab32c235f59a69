//! Verification toolkit for norm identities of pairs of projection matrices.
//!
//! For projections `f`, `g` the anticommutator satisfies `‖fg + gf‖ = ‖fg‖ + ‖fg‖²`.
//! This crate checks that identity and the machinery around it on concrete matrices:
//! exact polynomial expansions of `(fg + gf)^n`, the block form of `g` over
//! `range(f)`, the product-power and commutator lemmas, and pre-limit bound sequences.

pub mod cli;
pub mod linalg;
pub mod polynomials;
pub mod projections;
pub mod verify;
