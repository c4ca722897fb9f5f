//! Numerical toolkit for the Sturm-Liouville equation
//! `-(r y')' + q y = f` on the real line.
//!
//! The toolkit builds the principal fundamental system and Green kernel of
//! the equation, solves the auxiliary length functions that control the
//! operator locally, and renders solvability / resolvent-compactness
//! verdicts from their window suprema and edge trends. Hardy-type norm
//! brackets and a discretized eigenvalue estimate cross-validate the
//! verdicts at `p = 2`.
//!
//! All asymptotic statements are reported as trends over nested windows;
//! nothing here claims to prove a limit on the whole line.

pub mod coeff;
pub mod criteria;
pub mod error;
pub mod fss;
pub mod geometry;
pub mod hardy;
pub mod quad;
pub mod report;
pub mod spectral;
pub mod trend;
pub mod verify;

pub use error::{Error, Result};
