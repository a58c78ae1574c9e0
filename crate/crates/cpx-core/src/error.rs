//! Crate-wide error type.

use crate::lattice::MultiIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid body: a = {a}, b = {b} must be positive with gcd(a, b) = 1")]
    InvalidBody { a: u32, b: u32 },

    #[error("invalid hypotenuse parameter t = {t}: need 0 < t < 1")]
    InvalidDirection { t: f64 },

    #[error("bodies disagree: ({a1}, {b1}) vs ({a2}, {b2})")]
    BodyMismatch { a1: u32, b1: u32, a2: u32, b2: u32 },

    #[error("{context}: got {got} points, need at least {need}")]
    TooFewPoints {
        context: &'static str,
        got: usize,
        need: usize,
    },

    #[error("free basis is rank deficient on the point set (column {column})")]
    RankDeficient { column: usize },

    #[error("monomial z1^{} z2^{} depends on earlier basis elements on this support", .index.j, .index.k)]
    DependentMonomial { index: MultiIndex },

    #[error("constraint functional vanishes on every free coefficient; problem is infeasible")]
    Infeasible,

    #[error("node set is not unisolvent: cardinal defect {defect:.3e} exceeds {tol:.1e}")]
    NotUnisolvent { defect: f64, tol: f64 },

    #[error("polynomial evaluation overflowed; use log-scale evaluation instead")]
    Overflow,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
