//! Partition calculus for pairs over the lattice of finite sets.
//!
//! The crate runs the constructive side of cofinal-homogeneity arguments on
//! finite windows: end-homogeneous extraction along chains, bounded goodness
//! checks, approximation building, the adversarial constrained coloring, and
//! brute-force oracles for all of them. Every quantifier ranges over an
//! explicit finite window; nothing here claims to decide infinite statements.

pub mod coloring;
pub mod construction;
pub mod error;
pub mod exec;
pub mod laver;
pub mod lattice;
pub mod oracle;
pub mod ramsey;

pub use coloring::{Color, PairColoring, PartialColoring, Rule, TotalColoring};
pub use error::{Error, Result};
pub use exec::Exec;
pub use lattice::{AnchoredPair, FinPoset, FinSet, Label};

/// Schema tag carried by every serialized report and certificate.
pub const SCHEMA_VERSION: &str = "cofinal/1";
