//! Exact and numerical tools for Furstenberg's skew product on the 2-torus:
//! dyadic frequency arithmetic, the lacunary series behind the cocycle, the
//! map itself with closed-form iteration and density certificates, and a small
//! invariant-measure laboratory.

pub mod dyadic;
pub mod dynamics;
pub mod measures;
pub mod error;
pub mod numeric;
pub mod series;

pub use error::{Error, Result};
