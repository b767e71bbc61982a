//! Quantum wave impedance solver for one-dimensional scattering and bound
//! states.
//!
//! A potential is described by a [`model::PotentialModel`], discretised into
//! a [`model::Staircase`] of constant regions plus delta terms, and solved by
//! carrying the wave impedance from the right lead back to the left one.
//! [`oracle`] holds independent transfer-matrix and closed-form references.

pub mod cli;
pub mod discretize;
pub mod error;
pub mod impedance;
pub mod model;
pub mod oracle;
pub mod solve;

pub use discretize::{build_staircase, refine, DivisionStrategy};
pub use error::{Error, Result};
pub use model::{
    wavenumber, BoundStateReport, DeltaTerm, Material, Piece, PotentialModel, Profile, ReducedImpedance,
    ScatteringResult, Staircase, H2_OVER_2M0,
};
