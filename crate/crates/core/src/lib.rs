//! Deciding compatibility of families of real-rooted polynomials.
//!
//! A family is *compatible* when every nonnegative combination of its members
//! is real-rooted. This crate decides compatibility through interlacing,
//! builds common interleavers as witnesses, implements the mean and root-shift
//! perturbations, and validates every verdict against a sampling oracle.

pub mod cli;
pub mod compat;
pub mod error;
pub mod interlace;
pub mod io;
pub mod mobius;
pub mod oracle;
pub mod poly;
pub mod rootfind;
pub mod tolerance;

pub use error::{Error, Result};
pub use poly::{Degree, Family, Poly};
pub use tolerance::Tolerances;
