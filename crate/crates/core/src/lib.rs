//! Computational kernels for lower bounds on systoles of hyperbolic
//! manifolds: Lorentzian and upper half-space geometry, Margulis-tube
//! bounds, triangulation combinatorics, cocycles, polynomial systems over
//! the representation variety, and log-space bound arithmetic.

pub mod certificate;
pub mod cocycle;
pub mod error;
pub mod grigoriev;
pub mod hyperboloid;
pub mod linalg;
pub mod margulis;
pub mod oracles;
pub mod polysys;
pub mod real;
pub mod sampling;
pub mod triangulation;
pub mod uhs;

pub use error::{Error, Result};
