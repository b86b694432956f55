//! Simulation and design toolkit for RF energy-harvesting (rectenna) chains.
//!
//! The crate covers the full chain: antenna front-end and free-space link
//! budget ([`rf_link`]), Wilkinson power combining ([`combiner`]),
//! maximum-power-transfer matching ([`matching`]), multi-stage Schottky
//! voltage-doubler rectifiers ([`rectifier`]) over a nonlinear MNA solver
//! ([`circuit`]), and end-to-end power and load sweeps ([`chain`]).

// Validation uses `!(x > 0.0)` instead of `x <= 0.0` so NaN fails too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod circuit;
pub mod combiner;
pub mod linalg;
pub mod matching;
pub mod rectifier;
pub mod rf_link;
pub mod si;

pub use num_complex::Complex64;
