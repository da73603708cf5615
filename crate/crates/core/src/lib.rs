//! Exact and sampled expectations of labeled expander random walks over
//! finite groups.
//!
//! The crate is layered bottom-up:
//!
//! * [`group`] builds finite groups as explicit multiplication tables.
//! * [`rep`] supplies unitary irreducible representations, character tables,
//!   the group Fourier transform and Clebsch–Gordan multiplicities.
//! * [`graph`] builds labeled expanders (Cayley graphs, complete graphs on
//!   `G^r`), their spectra and structural certificates.
//! * [`walk`] evaluates walk expectations exactly (dynamic programming over
//!   the walk) or by Monte Carlo, together with the gap-family bounds.
//! * [`functions`] holds the test-function classes: symmetric, threshold,
//!   word and class functions, and their Fourier levels.
//! * [`verify`] turns each quantitative bound into an executable check.
//! * [`config`] is the declarative experiment format used by the CLI.

pub mod config;
pub mod error;
pub mod experiment;
pub mod functions;
pub mod graph;
pub mod group;
pub mod linalg;
pub mod numfmt;
pub mod rep;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use functions::{FunctionSpec, RawTable, SymmetricFunction, WordFunction};
pub use graph::LabeledExpander;
pub use group::{FamilySpec, FiniteGroup};
pub use rep::RepSystem;
