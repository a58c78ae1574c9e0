//! Shared fixtures for the kernel benchmarks: one place to build the sets
//! and problems so every bench measures the same inputs.

use num_complex::Complex64;

use cpx_core::cpoly::CPolynomial;
use cpx_core::domain::DiscreteCompact;
use cpx_core::lattice::{MultiIndex, TriangleBody};
use cpx_core::minimax::MinimaxProblem;

pub fn body11() -> TriangleBody {
    TriangleBody::new(1, 1).expect("coprime")
}

pub fn body23() -> TriangleBody {
    TriangleBody::new(2, 3).expect("coprime")
}

pub fn torus(m: u32) -> DiscreteCompact {
    DiscreteCompact::torus(1.0, 1.0, m).expect("valid torus")
}

pub fn two_shell_reinhardt(m: u32) -> DiscreteCompact {
    DiscreteCompact::reinhardt(&[(0.8, 0.9), (1.1, 1.25)], m).expect("valid profile")
}

/// Fixed two-coefficient minimax instance: fit the degree-2 edge monomial
/// from below with a constant and `z1` correction.
pub fn minimax_instance(body: TriangleBody) -> MinimaxProblem {
    let one = Complex64::new(1.0, 0.0);
    MinimaxProblem {
        fixed_part: CPolynomial::from_terms(
            body,
            [
                (MultiIndex::new(2, 0), one),
                (MultiIndex::new(0, 2), Complex64::new(0.5, 0.25)),
            ],
        ),
        free_basis: vec![
            CPolynomial::constant(body, one),
            CPolynomial::monomial(body, MultiIndex::new(1, 0), one),
        ],
        constraint: None,
    }
}
