//! Periodic-domain compressible Navier-Stokes-Fourier solver built around a
//! truncated virial pressure law that may be non-monotone in density.
//!
//! The crate provides:
//! - the state law and every quantity derived from it ([`law`], [`coeff`]),
//! - a numerical audit of the structural assumptions ([`validator`]),
//! - cell-centered periodic fields and discrete operators ([`grid`],
//!   [`field`], [`ops`]),
//! - the frozen-temperature hydrodynamic step ([`hydro`]),
//! - the regularized thermal solve on the good unknown `g` ([`thermal`]),
//! - the damped fixed-point coupling of the two ([`coupler`]),
//! - conservation and inequality diagnostics ([`diagnostics`]),
//! - manufactured-solution verification cases ([`mms`]).

pub mod coeff;
pub mod coupler;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod hydro;
pub mod law;
pub mod linsolve;
pub mod mms;
pub mod ops;
pub mod presets;
pub mod scan;
pub mod thermal;
pub mod validator;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use grid::PeriodicGrid;
pub use law::{ThermoPoint, VirialLaw};
