//! Numerical verification toolkit for a kinetic (hypoelliptic) Gehring lemma.
//!
//! The crate provides the Galilean group and kinetic cylinders
//! ([`geometry`]), Vitali coverings ([`covering`]), the cut-off localisation
//! ([`localization`]), grid-field calculus ([`field`]), exact Gehring constants
//! ([`constants`]), a finite-difference kinetic Fokker-Planck solver ([`kfp`])
//! and the suite runner used by the `kg` binary ([`harness`]).

pub mod constants;
pub mod covering;
pub mod error;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod kfp;
pub mod localization;
pub mod sampling;

pub use error::{KgError, Result};
pub use geometry::{Cylinder, Point};
