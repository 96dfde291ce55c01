//! Degenerations of complex rational maps and their non-Archimedean limits.
//!
//! The crate evaluates both sides of a degenerating family: classical
//! complex dynamics at each parameter (resultant minimization over the
//! Möbius group, equilibrium-measure sampling, Lyapunov exponents,
//! conformal barycenters), and exact dynamics on the Berkovich projective
//! line over a Puiseux-series field at the limit. The `hybrid` module ties
//! the two together and checks the rescaled complex quantities against
//! their exact non-Archimedean counterparts.

pub mod cxdyn;
pub mod berk;
pub mod error;
pub mod field;
pub mod numeric;
pub mod poly;
pub mod puiseux;
pub mod moduli;
pub mod ratmap;

pub use error::{Error, Result};
pub use field::{GaussRational, Scalar};
pub use puiseux::{Puiseux, Valuation};
