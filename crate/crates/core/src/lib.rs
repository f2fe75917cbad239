//! Toolchain for Multiway Storage Modification Machines (MWSMM).
//!
//! * [`graph`]: machine state, path resolution, canonical forms, string
//!   decoding and JSON/DOT export.
//! * [`asm`]: program text parser, validator and formatter.
//! * [`engine`]: fork execution and the deterministic round loop.
//! * [`multiway`]: non-deterministic evolution graphs and convergence.
//! * [`qbf`]: quantified boolean formulas, a brute-force evaluator and
//!   their compilation to MWSMM programs.
//! * [`subst`]: string substitution systems, their compilation and a
//!   string-level multiway oracle.

pub mod artifact;
pub mod asm;
pub mod engine;
pub mod error;
pub mod graph;
pub mod multiway;
pub mod qbf;
pub mod subst;

pub use error::{Error, Result};
