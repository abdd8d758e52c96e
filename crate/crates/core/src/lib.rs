//! Exact enumeration toolkit for S-Motzkin lattice paths and three variants:
//! catastrophes (read left-to-right), catastrophes read right-to-left, and
//! air pockets.
//!
//! An S-Motzkin path is a Motzkin path (up, level and down unit steps, never
//! dipping below the x-axis) in which, ignoring the down steps, level and up
//! steps strictly alternate starting with a level step. A catastrophe is an
//! extra step that drops from any level `j >= 2` straight to level 0. An air
//! pocket collapses a maximal run of down steps into a single step of depth
//! `k`; two such jumps can never be adjacent.
//!
//! Each counting sequence is computed three independent ways and cross-checked:
//!
//! * [`models`] — layered automata for the four path models, with exhaustive
//!   brute-force enumeration as the ground-truth oracle;
//! * [`dp`] — dynamic programming over the layer recursions, scaling to
//!   hundreds of terms;
//! * [`kernel`] — closed forms obtained from the kernel method, evaluated in
//!   exact truncated power/Laurent series arithmetic ([`series`]).
//!
//! [`asymptotics`] locates the dominant singularities numerically and derives
//! growth rates and pole amplitudes, with an empirical estimator over long
//! exact coefficient tails as the arbiter between amplitude conventions.
//! [`verify`] bundles the whole cross-check suite into one report.

pub mod asymptotics;
pub mod dp;
pub mod fixed;
pub mod kernel;
pub mod models;
pub mod series;
pub mod verify;

pub use num::{BigInt, BigRational};
