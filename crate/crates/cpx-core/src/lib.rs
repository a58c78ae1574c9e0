//! Numerical toolkit for plurisubharmonic extremal problems associated with a
//! triangle convex body `C = co{(0,0),(b,0),(0,a)}` with `gcd(a,b) = 1`.
//!
//! The crate is organised around the pipeline
//! lattice combinatorics -> polynomial algebra -> discrete compacts ->
//! Chebyshev-type minimax solves -> Fekete/Leja node extraction ->
//! extremal-function and transfinite-diameter estimators.

#![forbid(unsafe_code)]

pub mod cpoly;
pub mod domain;
pub mod error;
pub mod extremal;
pub mod io;
pub mod lattice;
pub(crate) mod linalg;
pub mod minimax;
pub mod nodes;
pub mod validate;

pub use cpoly::{circle_act, CPoint, CPolynomial};
pub use domain::{BoundaryGrid, DiscreteCompact, DiscreteMeasure};
pub use error::{Error, Result};
pub use extremal::{FamilyMember, FamilyProvenance, PolynomialFamily, ScalarField};
pub use lattice::{HypotenuseDirection, MultiIndex, MultiIndexBasis, TriangleBody};
pub use minimax::{MinimaxProblem, MinimaxSolution, SolverOptions};
pub use nodes::NodeSet;

pub use num_complex::Complex64;
