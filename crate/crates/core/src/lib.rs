//! Core library behind the `riskmeter` tool: monetary risk evaluation on
//! finite scenario spaces when the probability model itself is uncertain.
//!
//! The building blocks are scenario spaces and measures on them
//! ([`measure`]), polytopes of admissible weightings ([`polytope`]), penalty
//! functions over those weightings ([`penalty`]), and a small dense-simplex
//! solver ([`lp`]) used wherever a vertex list is unavailable or a
//! certificate is needed. On top sit the risk operators and their diagnostic
//! comparisons ([`risk`]), market examples with hedging duality ([`market`]),
//! parametric families and mixtures ([`mixture`]), and a randomized property
//! verifier ([`verify`]).

pub mod fixtures;
pub mod lp;
pub mod market;
pub mod measure;
pub mod mixture;
pub mod penalty;
pub mod polytope;
pub mod risk;
pub mod verify;
pub mod wire;
