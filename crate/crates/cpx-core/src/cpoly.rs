//! Polynomials graded by the triangle body: sparse terms `c * z1^j z2^k`,
//! C-degree bookkeeping, the top-line ("hat") extraction, weight-homogeneous
//! parts, and the circle action `lambda . (z1, z2) = (lambda^a z1, lambda^b z2)`.
//!
//! Evaluation comes in two flavours: plain complex Horner evaluation, and a
//! log-modulus evaluation that rebases every term against the largest term so
//! that inputs like `|z_i| = 1e6` with degree-30 monomials stay inside f64
//! range. All degree decisions (`c_degree`, `hat`) are made from exact integer
//! weights; coefficients are pruned only when they are exactly zero, never by
//! an epsilon, so the combinatorial degree is not corrupted by rounding.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, TriangleBody};

/// A point of C^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CPoint {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl CPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        CPoint { z1, z2 }
    }

    pub fn from_re(x1: f64, x2: f64) -> Self {
        CPoint {
            z1: Complex64::new(x1, 0.0),
            z2: Complex64::new(x2, 0.0),
        }
    }
}

/// Integer power by repeated squaring; exact for the exponent bookkeeping used
/// throughout (exponents stay well below 2^31).
pub(crate) fn cpow(z: Complex64, e: u32) -> Complex64 {
    let mut base = z;
    let mut exp = e;
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Evaluates every monomial of `basis` on `pts`, column-major: the `i`-th
/// entry holds the values of the `i`-th basis monomial at all points. Uses
/// per-point power tables so the cost is linear in `|pts| * |basis|`.
pub(crate) fn monomial_columns(
    basis: &crate::lattice::MultiIndexBasis,
    pts: &[CPoint],
) -> Vec<Vec<Complex64>> {
    use rayon::prelude::*;
    let jmax = basis.indices().iter().map(|a| a.j).max().unwrap_or(0) as usize;
    let kmax = basis.indices().iter().map(|a| a.k).max().unwrap_or(0) as usize;
    let powers: Vec<(Vec<Complex64>, Vec<Complex64>)> = pts
        .par_iter()
        .map(|z| {
            let one = Complex64::new(1.0, 0.0);
            let mut p1 = Vec::with_capacity(jmax + 1);
            let mut p2 = Vec::with_capacity(kmax + 1);
            let mut acc = one;
            for _ in 0..=jmax {
                p1.push(acc);
                acc *= z.z1;
            }
            acc = one;
            for _ in 0..=kmax {
                p2.push(acc);
                acc *= z.z2;
            }
            (p1, p2)
        })
        .collect();
    basis
        .indices()
        .par_iter()
        .map(|alpha| {
            powers
                .iter()
                .map(|(p1, p2)| p1[alpha.j as usize] * p2[alpha.k as usize])
                .collect()
        })
        .collect()
}

/// The weighted circle action `(lambda^a z1, lambda^b z2)`.
pub fn circle_act(body: &TriangleBody, lambda: Complex64, z: CPoint) -> CPoint {
    CPoint {
        z1: cpow(lambda, body.a()) * z.z1,
        z2: cpow(lambda, body.b()) * z.z2,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    j: u32,
    k: u32,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CPolynomialJson {
    a: u32,
    b: u32,
    terms: Vec<TermJson>,
}

/// Sparse polynomial tied to a body. Zero coefficients are removed on
/// construction and after every arithmetic operation; the zero polynomial has
/// no terms and reports C-degree 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CPolynomialJson", into = "CPolynomialJson")]
pub struct CPolynomial {
    body: TriangleBody,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl From<CPolynomial> for CPolynomialJson {
    fn from(p: CPolynomial) -> Self {
        CPolynomialJson {
            a: p.body.a(),
            b: p.body.b(),
            terms: p
                .terms
                .iter()
                .map(|(alpha, c)| TermJson {
                    j: alpha.j,
                    k: alpha.k,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<CPolynomialJson> for CPolynomial {
    type Error = Error;

    fn try_from(raw: CPolynomialJson) -> Result<Self> {
        let body = TriangleBody::new(raw.a, raw.b)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| (MultiIndex::new(t.j, t.k), Complex64::new(t.re, t.im)));
        Ok(CPolynomial::from_terms(body, terms))
    }
}

impl CPolynomial {
    pub fn zero(body: TriangleBody) -> Self {
        CPolynomial {
            body,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(body: TriangleBody, c: Complex64) -> Self {
        Self::from_terms(body, [(MultiIndex::new(0, 0), c)])
    }

    pub fn monomial(body: TriangleBody, alpha: MultiIndex, c: Complex64) -> Self {
        Self::from_terms(body, [(alpha, c)])
    }

    /// Builds from `(index, coefficient)` pairs; repeated indices are summed,
    /// exactly-zero results dropped.
    pub fn from_terms<I>(body: TriangleBody, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, c) in terms {
            let entry = map.entry(alpha).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        CPolynomial { body, terms: map }
    }

    pub fn body(&self) -> TriangleBody {
        self.body
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.terms.iter().map(|(&alpha, &c)| (alpha, c))
    }

    pub fn coefficient(&self, alpha: MultiIndex) -> Complex64 {
        self.terms
            .get(&alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// C-degree: max over terms of the index degree; 0 for the zero polynomial.
    pub fn c_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&alpha| self.body.c_degree(alpha))
            .max()
            .unwrap_or(0)
    }

    /// Largest `z1` exponent present (0 if zero polynomial).
    pub fn max_j(&self) -> u32 {
        self.terms.keys().map(|alpha| alpha.j).max().unwrap_or(0)
    }

    /// Largest `z2` exponent present (0 if zero polynomial).
    pub fn max_k(&self) -> u32 {
        self.terms.keys().map(|alpha| alpha.k).max().unwrap_or(0)
    }

    /// Plain evaluation, Horner within each `z2`-row and Horner across rows.
    /// An overflowed (non-finite) result is reported as an error; callers that
    /// expect extreme magnitudes should use [`CPolynomial::log_abs`].
    pub fn evaluate(&self, z: CPoint) -> Result<Complex64> {
        let v = self.evaluate_raw(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow)
        }
    }

    pub(crate) fn evaluate_raw(&self, z: CPoint) -> Complex64 {
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        // Terms grouped by k (rows); BTreeMap order is (j, k) lexicographic,
        // so re-bucket first.
        let mut rows: BTreeMap<u32, Vec<(u32, Complex64)>> = BTreeMap::new();
        for (&alpha, &c) in &self.terms {
            rows.entry(alpha.k).or_default().push((alpha.j, c));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev_k: Option<u32> = None;
        for (&k, row) in rows.iter().rev() {
            if let Some(pk) = prev_k {
                acc *= cpow(z.z2, pk - k);
            }
            // Horner in z1 over descending j with sparse gaps.
            let mut row_val = Complex64::new(0.0, 0.0);
            let mut prev_j: Option<u32> = None;
            for &(j, c) in row.iter().rev() {
                if let Some(pj) = prev_j {
                    row_val *= cpow(z.z1, pj - j);
                }
                row_val += c;
                prev_j = Some(j);
            }
            if let Some(pj) = prev_j {
                row_val *= cpow(z.z1, pj);
            }
            acc += row_val;
            prev_k = Some(k);
        }
        if let Some(pk) = prev_k {
            acc *= cpow(z.z2, pk);
        }
        acc
    }

    /// `log |p(z)|`. When every term can be formed without leaving f64 range
    /// the value comes from plain Horner evaluation, so exact cancellation
    /// really produces `-inf`. Otherwise each term is carried as
    /// (log-modulus, phase), the largest log-modulus is factored out, and the
    /// rebased terms (all of modulus <= 1) are summed; on that path a true
    /// zero of `p` shows up as a very negative value rather than `-inf`,
    /// since the polar rebasing cannot cancel exactly. Returns `-inf` for
    /// the zero polynomial and at points where every term vanishes.
    ///
    /// "Without leaving f64 range" is checked per term on the partial stages
    /// `|c|`, `|c z1^j|`, `|c z1^j z2^k|`: no stage may come near overflow,
    /// and no stage of a term within `e^40` of the largest may come near
    /// underflow (smaller terms cannot move the result). The margin 600 is
    /// far inside `ln(f64::MAX) ~ 709`.
    pub fn log_abs(&self, z: CPoint) -> f64 {
        if self.terms.is_empty() {
            return f64::NEG_INFINITY;
        }
        let r1 = z.z1.norm();
        let r2 = z.z2.norm();
        let l1 = r1.ln(); // -inf when z1 = 0
        let l2 = r2.ln();

        let mut logs = Vec::with_capacity(self.terms.len());
        let mut mx = f64::NEG_INFINITY;
        let mut overflow_risk = false;
        for (&alpha, &c) in &self.terms {
            let s0 = c.norm().ln();
            let s1 = if alpha.j == 0 {
                s0
            } else if r1 == 0.0 {
                f64::NEG_INFINITY
            } else {
                s0 + alpha.j as f64 * l1
            };
            let s2 = if alpha.k == 0 || s1 == f64::NEG_INFINITY {
                s1
            } else if r2 == 0.0 {
                f64::NEG_INFINITY
            } else {
                s1 + alpha.k as f64 * l2
            };
            if s0.max(s1).max(s2) >= 600.0 {
                overflow_risk = true;
            }
            // stages that are -inf are exact zeros in direct arithmetic, not
            // flushed values, so they do not count against the underflow rule
            let smin = [s0, s1, s2]
                .into_iter()
                .filter(|v| v.is_finite())
                .fold(f64::INFINITY, f64::min);
            if s2 > mx {
                mx = s2;
            }
            logs.push((alpha, c, s2, smin));
        }
        if mx == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let direct_ok = !overflow_risk
            && logs
                .iter()
                .all(|&(_, _, t, smin)| t < mx - 40.0 || smin > -600.0);
        if direct_ok {
            return self.evaluate_raw(z).norm().ln();
        }
        let p1 = z.z1.im.atan2(z.z1.re);
        let p2 = z.z2.im.atan2(z.z2.re);
        let mut sum = Complex64::new(0.0, 0.0);
        for (alpha, c, t, _) in logs {
            if t == f64::NEG_INFINITY {
                continue;
            }
            let mag = (t - mx).exp();
            let phase = c.im.atan2(c.re) + alpha.j as f64 * p1 + alpha.k as f64 * p2;
            sum += Complex64::from_polar(mag, phase);
        }
        let s = sum.norm();
        if s == 0.0 {
            f64::NEG_INFINITY
        } else {
            mx + s.ln()
        }
    }

    pub fn scale(&self, c: Complex64) -> CPolynomial {
        CPolynomial::from_terms(self.body, self.terms().map(|(alpha, v)| (alpha, v * c)))
    }

    pub fn add(&self, other: &CPolynomial) -> Result<CPolynomial> {
        self.check_body(other)?;
        Ok(CPolynomial::from_terms(
            self.body,
            self.terms().chain(other.terms()),
        ))
    }

    /// `self + c * other` in place; bodies must agree.
    pub fn add_scaled(&mut self, c: Complex64, other: &CPolynomial) -> Result<()> {
        self.check_body(other)?;
        for (alpha, v) in other.terms() {
            let entry = self
                .terms
                .entry(alpha)
                .or_insert(Complex64::new(0.0, 0.0));
            *entry += c * v;
        }
        self.terms.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(())
    }

    pub fn multiply(&self, other: &CPolynomial) -> Result<CPolynomial> {
        self.check_body(other)?;
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, ca) in self.terms() {
            for (beta, cb) in other.terms() {
                let gamma = MultiIndex::new(alpha.j + beta.j, alpha.k + beta.k);
                let entry = map.entry(gamma).or_insert(Complex64::new(0.0, 0.0));
                *entry += ca * cb;
            }
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(CPolynomial {
            body: self.body,
            terms: map,
        })
    }

    /// The top-line part: terms of weight exactly `c_degree * a * b`. May be
    /// the zero polynomial when `a*b > 1` (the degree can be attained strictly
    /// inside the dilated body).
    pub fn hat(&self) -> CPolynomial {
        let line = self.c_degree() as u64 * self.body.ab();
        self.homogeneous_part(line)
    }

    /// Terms of weight `a*j + b*k` exactly `l`.
    pub fn homogeneous_part(&self, l: u64) -> CPolynomial {
        CPolynomial {
            body: self.body,
            terms: self
                .terms
                .iter()
                .filter(|(&alpha, _)| self.body.weight(alpha) == l)
                .map(|(&alpha, &c)| (alpha, c))
                .collect(),
        }
    }

    /// All weights carrying at least one term, ascending.
    pub fn weights(&self) -> Vec<u64> {
        let mut ws: Vec<u64> = self.terms.keys().map(|&a| self.body.weight(a)).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    fn check_body(&self, other: &CPolynomial) -> Result<()> {
        if self.body != other.body {
            return Err(Error::BodyMismatch {
                a1: self.body.a(),
                b1: self.body.b(),
                a2: other.body.a(),
                b2: other.body.b(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(a: u32, b: u32) -> TriangleBody {
        TriangleBody::new(a, b).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn evaluate_frozen_example() {
        // p = z1^2 + z2 at (1 + i, 0) -> (1+i)^2 = 2i
        let b = body(1, 1);
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(2, 0), one()),
                (MultiIndex::new(0, 1), one()),
            ],
        );
        let v = p
            .evaluate(CPoint::new(c(1.0, 1.0), c(0.0, 0.0)))
            .unwrap();
        assert!((v - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_polynomial_behaviour() {
        let b = body(2, 3);
        let z = CPolynomial::zero(b);
        assert!(z.is_zero());
        assert_eq!(z.c_degree(), 0);
        let v = z.evaluate(CPoint::from_re(3.0, 4.0)).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        assert_eq!(z.log_abs(CPoint::from_re(1.0, 1.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn construction_cancels_exact_zeros() {
        let b = body(1, 1);
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(1, 0), one()),
                (MultiIndex::new(1, 0), c(-1.0, 0.0)),
            ],
        );
        assert!(p.is_zero());
    }

    #[test]
    fn evaluate_matches_naive_on_random_polys() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(a, bq) in &[(1u32, 1u32), (2, 3)] {
            let b = body(a, bq);
            for _ in 0..50 {
                let nterms = rng.gen_range(1..12);
                let terms: Vec<_> = (0..nterms)
                    .map(|_| {
                        (
                            MultiIndex::new(rng.gen_range(0..7), rng.gen_range(0..7)),
                            c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                        )
                    })
                    .collect();
                let p = CPolynomial::from_terms(b, terms.clone());
                let z = CPoint::new(
                    c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                    c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                );
                let mut naive = c(0.0, 0.0);
                for (alpha, cc) in p.terms() {
                    naive += cc * cpow(z.z1, alpha.j) * cpow(z.z2, alpha.k);
                }
                let horner = p.evaluate(z).unwrap();
                assert!(
                    (horner - naive).norm() <= 1e-10 * (1.0 + naive.norm()),
                    "horner {horner} vs naive {naive}"
                );
                // log_abs agrees with the direct value away from cancellation
                if naive.norm() > 1e-6 {
                    assert!((p.log_abs(z) - naive.norm().ln()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn log_abs_large_magnitudes() {
        let b = body(1, 1);
        // z1^100 at (e, 0) -> exactly 100
        let p = CPolynomial::monomial(b, MultiIndex::new(100, 0), one());
        let e = std::f64::consts::E;
        let v = p.log_abs(CPoint::from_re(e, 0.0));
        assert!((v - 100.0).abs() < 1e-9);

        // far outside plain f64 range: log stays finite and exact
        let q = CPolynomial::monomial(b, MultiIndex::new(400, 0), one());
        let lv = q.log_abs(CPoint::from_re(10.0, 1.0));
        assert!((lv - 400.0 * 10.0f64.ln()).abs() < 1e-6);
        assert!(matches!(
            q.evaluate(CPoint::from_re(10.0, 1.0)),
            Err(Error::Overflow)
        ));
    }

    #[test]
    fn log_abs_runtime_cancellation() {
        let b = body(1, 1);
        // p = z1 - z2 vanishes on the diagonal
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(1, 0), one()),
                (MultiIndex::new(0, 1), c(-1.0, 0.0)),
            ],
        );
        assert_eq!(p.log_abs(CPoint::from_re(1.0, 1.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn log_abs_at_axis_points() {
        let b = body(2, 3);
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(2, 0), c(3.0, 0.0)),
                (MultiIndex::new(0, 1), one()),
            ],
        );
        // z1 = 0 kills the first term
        let v = p.log_abs(CPoint::from_re(0.0, 2.0));
        assert!((v - 2.0f64.ln()).abs() < 1e-12);
        // both coordinates zero: only a constant would survive
        assert_eq!(p.log_abs(CPoint::from_re(0.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn multiply_degree_and_hat_frozen_example() {
        let b = body(2, 3);
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(3, 0), one()),
                (MultiIndex::new(0, 2), one()),
            ],
        );
        let q = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(3, 0), one()),
                (MultiIndex::new(0, 2), c(-1.0, 0.0)),
            ],
        );
        let pq = p.multiply(&q).unwrap();
        assert_eq!(pq.c_degree(), 2);
        assert_eq!(pq.num_terms(), 2); // z1^6 - z2^4, cross terms cancel
        let hat_pq = pq.hat();
        let hat_prod = p.hat().multiply(&q.hat()).unwrap();
        for (alpha, v) in hat_pq.terms() {
            assert!((v - hat_prod.coefficient(alpha)).norm() < 1e-14);
        }
        assert_eq!(hat_pq.num_terms(), hat_prod.num_terms());
    }

    #[test]
    fn hat_frozen_examples() {
        let b11 = body(1, 1);
        let p = CPolynomial::from_terms(
            b11,
            [
                (MultiIndex::new(1, 1), one()),
                (MultiIndex::new(1, 0), one()),
                (MultiIndex::new(0, 0), one()),
            ],
        );
        let h = p.hat();
        assert_eq!(h.num_terms(), 1);
        assert_eq!(h.coefficient(MultiIndex::new(1, 1)), one());

        // body (2,3): z1 z2 has weight 5 < 6, degree 1, empty top line
        let b23 = body(2, 3);
        let q = CPolynomial::monomial(b23, MultiIndex::new(1, 1), one());
        assert_eq!(q.c_degree(), 1);
        assert!(q.hat().is_zero());

        let r = CPolynomial::from_terms(
            b23,
            [
                (MultiIndex::new(3, 0), one()),
                (MultiIndex::new(0, 2), c(2.0, 0.0)),
                (MultiIndex::new(1, 1), c(5.0, 0.0)),
            ],
        );
        let rh = r.hat();
        assert_eq!(rh.num_terms(), 2);
        assert_eq!(rh.coefficient(MultiIndex::new(3, 0)), one());
    }

    #[test]
    fn homogeneous_parts_reconstruct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &(a, bq) in &[(1u32, 1u32), (2, 3)] {
            let b = body(a, bq);
            let terms: Vec<_> = (0..15)
                .map(|_| {
                    (
                        MultiIndex::new(rng.gen_range(0..6), rng.gen_range(0..6)),
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let p = CPolynomial::from_terms(b, terms);
            let mut sum = CPolynomial::zero(b);
            for l in p.weights() {
                sum = sum.add(&p.homogeneous_part(l)).unwrap();
            }
            assert_eq!(sum, p);
        }
    }

    #[test]
    fn circle_act_frozen_examples() {
        let b11 = body(1, 1);
        let i = c(0.0, 1.0);
        let out = circle_act(&b11, i, CPoint::from_re(1.0, 1.0));
        assert!((out.z1 - i).norm() < 1e-15 && (out.z2 - i).norm() < 1e-15);

        let b23 = body(2, 3);
        let out = circle_act(&b23, c(2.0, 0.0), CPoint::from_re(1.0, 1.0));
        assert!((out.z1 - c(4.0, 0.0)).norm() < 1e-13);
        assert!((out.z2 - c(8.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn circle_act_phase_preserves_moduli() {
        let b23 = body(2, 3);
        let lam = Complex64::from_polar(1.0, 0.37);
        let z = CPoint::new(Complex64::from_polar(0.8, 1.1), Complex64::from_polar(1.0, -0.4));
        let w = circle_act(&b23, lam, z);
        assert!((w.z1.norm() - 0.8).abs() < 1e-14);
        assert!((w.z2.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn monomial_homogeneity_under_action() {
        // |m(lambda . z)| = |lambda|^weight * |m(z)| for a monomial of that weight
        let b = body(2, 3);
        let alpha = MultiIndex::new(2, 1);
        let m = CPolynomial::monomial(b, alpha, c(0.5, 0.25));
        let z = CPoint::new(c(1.1, -0.3), c(0.2, 0.9));
        for &lam_abs in &[2.0f64, 10.0, 1000.0] {
            let lam = Complex64::from_polar(lam_abs, 0.7);
            let lhs = m.log_abs(circle_act(&b, lam, z));
            let rhs = m.log_abs(z) + b.weight(alpha) as f64 * lam_abs.ln();
            assert!((lhs - rhs).abs() < 1e-9, "lam={lam_abs}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn json_round_trip() {
        let b = body(2, 3);
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(3, 0), c(1.0, -2.0)),
                (MultiIndex::new(0, 2), c(0.25, 0.0)),
            ],
        );
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"a\":2") && s.contains("\"b\":3"));
        let q: CPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        // malformed body in the payload is rejected
        let bad = r#"{"a":2,"b":4,"terms":[]}"#;
        assert!(serde_json::from_str::<CPolynomial>(bad).is_err());
    }

    #[test]
    fn add_rejects_mixed_bodies() {
        let p = CPolynomial::constant(body(1, 1), one());
        let q = CPolynomial::constant(body(2, 3), one());
        assert!(matches!(p.add(&q), Err(Error::BodyMismatch { .. })));
        assert!(matches!(p.multiply(&q), Err(Error::BodyMismatch { .. })));
    }
}
