//! Core library for reasoning about budget-constrained coalition strategies
//! with discounted costs.
//!
//! The crate is split into four layers:
//!
//! - [`formula`] — the modal language `p | !f | (f -> f) | [a:q, ...] f`,
//!   its parser and canonical printer, and the exact budget-rescaling
//!   operator `f / mu`;
//! - [`game`] — finite concurrent games with a nondeterministic serial
//!   mechanism, plays, finite-state strategies and play simulation;
//! - [`checker`] — three-valued model checking of the maintenance modality
//!   via coinductive proof search with saturation, plus an independent
//!   bounded-horizon oracle;
//! - [`proof`] — a Hilbert-style proof kernel for the axiom system
//!   (Reflexivity, Cooperation, Monotonicity, Transitivity) and script
//!   generators for the derived lemmas.
//!
//! All arithmetic is exact: budgets, costs and discount factors are
//! arbitrary-precision rationals. The crate is `no_std` (alloc only); IO
//! and file formats live in the companion `disco` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod checker;
pub mod formula;
pub mod game;
pub mod proof;
pub mod rational;

pub use rational::Rat;
