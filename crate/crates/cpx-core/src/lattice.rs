//! Lattice combinatorics for the triangle body `C = co{(0,0),(b,0),(0,a)}`,
//! `gcd(a,b) = 1`: membership of multi-indices in dilates `nC`, the graded
//! C-degree, the induced monomial order, and hypotenuse directions.
//!
//! Everything here is exact integer arithmetic; floating point enters only in
//! [`TriangleBody::direction_index`] when comparing normalised indices against
//! a target direction.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent pair `(j, k)` of a monomial `z1^j z2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub j: u32,
    pub k: u32,
}

impl MultiIndex {
    pub const fn new(j: u32, k: u32) -> Self {
        MultiIndex { j, k }
    }
}

/// The triangle body, stored as the pair `(a, b)` of axis intercepts
/// (`(0, a)` on the `k`-axis, `(b, 0)` on the `j`-axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleBody {
    a: u32,
    b: u32,
}

fn gcd(mut x: u32, mut y: u32) -> u32 {
    while y != 0 {
        let r = x % y;
        x = y;
        y = r;
    }
    x
}

impl TriangleBody {
    /// Requires `a, b >= 1` and `gcd(a, b) = 1`.
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a == 0 || b == 0 || gcd(a, b) != 1 {
            return Err(Error::InvalidBody { a, b });
        }
        Ok(TriangleBody { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Weight `a*j + b*k` of a multi-index; the body membership and the
    /// C-degree are both functions of this integer.
    pub fn weight(&self, alpha: MultiIndex) -> u64 {
        self.a as u64 * alpha.j as u64 + self.b as u64 * alpha.k as u64
    }

    /// `a * b`, the weight of every lattice point on the outer edge of `1C`.
    pub fn ab(&self) -> u64 {
        self.a as u64 * self.b as u64
    }

    /// Membership `alpha in nC`, i.e. `a*j + b*k <= n*a*b`.
    pub fn contains(&self, alpha: MultiIndex, n: u32) -> bool {
        self.weight(alpha) <= n as u64 * self.ab()
    }

    /// The C-degree `ceil((a*j + b*k) / (a*b))`: the least `n` with
    /// `alpha in nC`.
    pub fn c_degree(&self, alpha: MultiIndex) -> u32 {
        let w = self.weight(alpha);
        let ab = self.ab();
        ((w + ab - 1) / ab) as u32
    }

    /// Graded order on multi-indices: by C-degree, then by `k`, then by `j`,
    /// all ascending. This is a strict total order refining the grading.
    pub fn cmp_indices(&self, alpha: MultiIndex, beta: MultiIndex) -> Ordering {
        self.c_degree(alpha)
            .cmp(&self.c_degree(beta))
            .then(alpha.k.cmp(&beta.k))
            .then(alpha.j.cmp(&beta.j))
    }

    /// Lattice points on the outer edge `a*j + b*k = n*a*b` of `nC`, in basis
    /// order. Because `gcd(a,b) = 1` these are exactly `(b.t, a.(n-t))` for
    /// `t = n, n-1, ..., 0`, which is `n + 1` points.
    pub fn homogeneous_line(&self, n: u32) -> Vec<MultiIndex> {
        let mut line: Vec<MultiIndex> = (0..=n)
            .rev()
            .map(|t| MultiIndex::new(self.b * t, self.a * (n - t)))
            .collect();
        line.sort_by(|x, y| self.cmp_indices(*x, *y));
        line
    }

    /// Normalised direction `alpha / k` on the outer edge of `kC` closest (in
    /// Euclidean distance) to `theta`; ties resolve to the smaller `k`
    /// component.
    pub fn direction_index(&self, theta: &HypotenuseDirection, k: u32) -> MultiIndex {
        assert!(k >= 1, "direction_index needs k >= 1");
        let (t1, t2) = theta.theta(self);
        let mut best: Option<(f64, MultiIndex)> = None;
        for alpha in self.homogeneous_line(k) {
            let d1 = alpha.j as f64 / k as f64 - t1;
            let d2 = alpha.k as f64 / k as f64 - t2;
            let d = d1 * d1 + d2 * d2;
            best = match best {
                None => Some((d, alpha)),
                Some((bd, balpha)) => {
                    if d < bd || (d == bd && alpha.k < balpha.k) {
                        Some((d, alpha))
                    } else {
                        Some((bd, balpha))
                    }
                }
            };
        }
        best.expect("homogeneous line is nonempty").1
    }
}

/// Interior point of the hypotenuse of `C`, parametrised as
/// `theta(t) = (b(1-t), a t)` for `0 < t < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypotenuseDirection {
    t: f64,
}

impl HypotenuseDirection {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidDirection { t });
        }
        Ok(HypotenuseDirection { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Coordinates of the direction for a concrete body.
    pub fn theta(&self, body: &TriangleBody) -> (f64, f64) {
        (body.b as f64 * (1.0 - self.t), body.a as f64 * self.t)
    }
}

/// The monomial basis of `Poly(nC)`: all lattice points of `nC` listed in the
/// graded order of [`TriangleBody::cmp_indices`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexBasis {
    body: TriangleBody,
    n: u32,
    indices: Vec<MultiIndex>,
}

impl MultiIndexBasis {
    pub fn new(body: TriangleBody, n: u32) -> Self {
        let nab = n as u64 * body.ab();
        let jmax = n * body.b;
        let kmax = n * body.a;
        let mut indices = Vec::new();
        for j in 0..=jmax {
            for k in 0..=kmax {
                let alpha = MultiIndex::new(j, k);
                if body.weight(alpha) <= nab {
                    indices.push(alpha);
                }
            }
        }
        indices.sort_by(|x, y| body.cmp_indices(*x, *y));
        MultiIndexBasis { body, n, indices }
    }

    pub fn body(&self) -> TriangleBody {
        self.body
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of lattice points `N_n`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Sum `l_n` of the C-degrees over the basis.
    pub fn degree_sum(&self) -> u64 {
        self.indices
            .iter()
            .map(|&alpha| self.body.c_degree(alpha) as u64)
            .sum()
    }

    /// Position of `alpha` in the basis, if present.
    pub fn position(&self, alpha: MultiIndex) -> Option<usize> {
        self.indices
            .binary_search_by(|probe| self.body.cmp_indices(*probe, alpha))
            .ok()
    }
}
