//! Self-validation: independent oracles (brute force, exhaustive enumeration)
//! and the acceptance battery that cross-checks the fast implementations
//! against them and against closed-form torus values.

pub mod criteria;
pub mod oracles;
