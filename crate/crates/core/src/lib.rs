//! Jaynes-Cummings dynamics with the field mode realized as a finite spin-j
//! system, whose spectrum is that of a Kerr medium with at most `2j`
//! excitations.
//!
//! Modules follow the physics bottom-up: [`spin`] holds the deformed ladder
//! algebra, [`coherent`] the SU(2) coherent states and their statistics,
//! [`dynamics`] the exact atom-field evolution, [`observables`] inversion,
//! photon statistics and squeezing, and [`run`] the time-grid driver behind the
//! `jcm` command line tool.

pub mod check;
pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod observables;
pub mod ode;
pub mod par;
pub mod run;
pub mod spin;

pub use error::{JcmError, Result};
pub use par::Execution;
