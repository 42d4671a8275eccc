//! Joint moments of bigraph-independent non-commutative random variables.
//!
//! Three independent routes are provided: cumulant expansions over
//! compatible partitions ([`cumulants`]), a truncated product Hilbert space
//! with vacuum-vector moments ([`hilbert`]), and exact or sampled random
//! matrix expectations ([`matrix_model`], [`weingarten`]).

pub mod bigraph;
pub mod compat;
pub mod cumulants;
pub mod error;
pub mod hilbert;
pub mod matrix_model;
pub mod ncps;
pub mod partitions;
pub mod perm;
pub mod problem;
pub mod weingarten;

pub use error::{Error, Result};
