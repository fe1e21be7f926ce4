//! Simulation library for ray antenna arrays (RAA).
//!
//! An RAA is a fan of simple uniform linear arrays whose elements are
//! hard-wired to one combiner per ray; a switch network routes a few ray
//! outputs to RF chains. This crate models the array geometry, beam responses,
//! multipath channels, joint ray selection with MMSE combining and hardware
//! cost, and compares all of it against a DFT-codebook hybrid beamforming
//! baseline.

pub mod channel;
pub mod cost;
pub mod error;
pub mod experiment;
pub mod geometry;
mod linalg;
pub mod response;
pub mod selection;
pub mod stats;

pub use channel::{MultipathChannel, PathComponent, ScenarioConfig, ScenarioMode};
pub use cost::PriceList;
pub use error::{RaaError, Result};
pub use geometry::{HbfCodebook, RaaGeometry};
pub use num_complex::Complex64;
pub use response::{AntennaPattern, Architecture, ArrayModel, BeamResponse, PatternKind};
pub use selection::{LinkBudget, SelectionSet};
