//! Extremal-function machinery built from polynomial families: the weighted
//! log gauge of the body, upper envelopes of normalised log-moduli, Robin
//! style envelopes of top-line parts, families from orthogonalisation and
//! from Chebyshev solves, the directional determinant estimate, and
//! consistency checks for circled sets.
//!
//! A family member of degree `d` and sup-norm `m` on `K` contributes
//! `(log|p(z)| - log m) / d` to the upper envelope; as families grow the
//! envelope climbs towards the extremal function of `K`. The Robin envelope
//! replaces `p` by its top-line part and captures the logarithmic growth at
//! infinity along weighted-homogeneous directions.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cpoly::{monomial_columns, CPoint, CPolynomial};
use crate::domain::{BoundaryGrid, DiscreteCompact, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::lattice::{HypotenuseDirection, MultiIndexBasis, TriangleBody};
use crate::minimax::{tau_direction_with, MonicContext, SolverOptions, TauEstimate};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The weighted log gauge `max(b log+|z1|, a log+|z2|)`: zero on the closed
/// unit bidisc, positive outside, and the growth envelope every member
/// contribution is squeezed under.
pub fn log_indicator(body: &TriangleBody, z: CPoint) -> f64 {
    let u = body.b() as f64 * z.z1.norm().ln().max(0.0);
    let v = body.a() as f64 * z.z2.norm().ln().max(0.0);
    u.max(v)
}

/// How a family was produced. Only bookkeeping; no behaviour depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyProvenance {
    Orthonormal,
    L2Monic,
    Chebyshev,
    VdmDifference,
}

/// One polynomial with the data its envelope contribution needs.
///
/// `degree_used` is the degree the normalisation divides by; constants carry
/// 1 there so their contribution `(log|c| - log|c|)/1 = 0` anchors the
/// envelope at zero instead of producing 0/0.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub polynomial: CPolynomial,
    pub degree_used: u32,
    pub norm_on_k: f64,
}

impl FamilyMember {
    pub fn new(polynomial: CPolynomial, norm_on_k: f64) -> Result<Self> {
        if !(norm_on_k > 0.0) || !norm_on_k.is_finite() {
            return Err(Error::InvalidInput(format!(
                "family member needs a positive finite norm, got {norm_on_k}"
            )));
        }
        let degree_used = polynomial.c_degree().max(1);
        Ok(FamilyMember {
            polynomial,
            degree_used,
            norm_on_k,
        })
    }
}

/// A finite family of polynomials attached to one body and degree budget.
#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    pub body: TriangleBody,
    pub n: u32,
    pub provenance: FamilyProvenance,
    pub members: Vec<FamilyMember>,
}

impl PolynomialFamily {
    pub fn new(
        body: TriangleBody,
        n: u32,
        provenance: FamilyProvenance,
        members: Vec<FamilyMember>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("family has no members".into()));
        }
        for m in &members {
            if m.polynomial.body() != body {
                return Err(Error::BodyMismatch {
                    a1: body.a(),
                    b1: body.b(),
                    a2: m.polynomial.body().a(),
                    b2: m.polynomial.body().b(),
                });
            }
            if m.polynomial.c_degree() > n {
                return Err(Error::InvalidInput(format!(
                    "member of degree {} exceeds the family budget {}",
                    m.polynomial.c_degree(),
                    n
                )));
            }
        }
        Ok(PolynomialFamily {
            body,
            n,
            provenance,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `max_i (log|p_i(z)| - log norm_i) / d_i`: the family's lower bound for the
/// extremal function at `z`. `-inf` when every member vanishes at `z`.
pub fn upper_envelope(family: &PolynomialFamily, z: CPoint) -> f64 {
    family
        .members
        .iter()
        .map(|m| (m.polynomial.log_abs(z) - m.norm_on_k.ln()) / m.degree_used as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Precomputed top-line parts for Robin-type evaluations. Members whose
/// top-line part vanishes identically (possible off the two axis monomials,
/// e.g. `z1 z2` for the body `(2,3)`) carry no growth information and are
/// dropped with a warning; degree-zero members are dropped silently since
/// they do not grow at all.
pub struct RobinFamily {
    entries: Vec<(CPolynomial, f64, u32)>,
}

impl RobinFamily {
    pub fn new(family: &PolynomialFamily) -> Self {
        let mut entries = Vec::with_capacity(family.members.len());
        let mut dropped = 0usize;
        for m in &family.members {
            if m.polynomial.c_degree() == 0 {
                continue;
            }
            let hat = m.polynomial.hat();
            if hat.is_zero() {
                dropped += 1;
                continue;
            }
            entries.push((hat, m.norm_on_k.ln(), m.degree_used));
        }
        if dropped > 0 {
            log::warn!(
                "robin envelope: dropped {dropped} member(s) with vanishing top-line part"
            );
        }
        RobinFamily { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `max_i (log|hat p_i(z)| - log norm_i) / d_i`; `-inf` if no member
    /// carries top-line information at `z`.
    pub fn at(&self, z: CPoint) -> f64 {
        self.entries
            .iter()
            .map(|(hat, log_norm, d)| (hat.log_abs(z) - log_norm) / *d as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Convenience wrapper over [`RobinFamily`] for single evaluations.
pub fn robin_envelope(family: &PolynomialFamily, z: CPoint) -> f64 {
    RobinFamily::new(family).at(z)
}

/// A scalar quantity sampled on a point grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub points: Vec<CPoint>,
    pub values: Vec<f64>,
}

/// Upper envelope sampled over `points`.
pub fn envelope_field(family: &PolynomialFamily, points: &[CPoint]) -> ScalarField {
    let values = points
        .par_iter()
        .map(|z| upper_envelope(family, *z))
        .collect();
    ScalarField {
        points: points.to_vec(),
        values,
    }
}

/// Robin envelope sampled over `points`.
pub fn robin_field(family: &PolynomialFamily, points: &[CPoint]) -> ScalarField {
    let rf = RobinFamily::new(family);
    let values = points.par_iter().map(|z| rf.at(*z)).collect();
    ScalarField {
        points: points.to_vec(),
        values,
    }
}

/// Log-spaced product grid `(r_i e^{i phi}, r_j e^{i psi})` used for field
/// evaluation and reference comparisons.
pub fn product_grid(
    r_min: f64,
    r_max: f64,
    n_radii: u32,
    n_phases: u32,
) -> Result<Vec<CPoint>> {
    if !(r_min > 0.0) || !(r_max >= r_min) || !r_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radial range [{r_min}, {r_max}] must be positive, finite and ordered"
        )));
    }
    if n_radii == 0 || n_phases == 0 {
        return Err(Error::InvalidInput(
            "grid needs at least one radius and one phase".into(),
        ));
    }
    let radii: Vec<f64> = if n_radii == 1 {
        vec![r_min]
    } else {
        let ratio = r_max / r_min;
        (0..n_radii)
            .map(|i| r_min * ratio.powf(i as f64 / (n_radii - 1) as f64))
            .collect()
    };
    let phases: Vec<Complex64> = (0..n_phases)
        .map(|s| Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / n_phases as f64))
        .collect();
    let mut pts = Vec::with_capacity(radii.len().pow(2) * phases.len().pow(2));
    for &r1 in &radii {
        for p1 in &phases {
            for &r2 in &radii {
                for p2 in &phases {
                    pts.push(CPoint::new(r1 * p1, r2 * p2));
                }
            }
        }
    }
    Ok(pts)
}

/// Ladder of direct Robin estimates for one polynomial: at each `lambda` the
/// value `(log|p(lambda . z)|)/d - ab log lambda`, which converges to the
/// top-line value `(log|hat p(z)|)/d` as `lambda` grows.
#[derive(Debug, Clone)]
pub struct RobinLadder {
    pub estimates: Vec<(f64, f64)>,
    pub hat_value: f64,
}

pub fn robin_direct(p: &CPolynomial, z: CPoint, lambdas: &[f64]) -> Result<RobinLadder> {
    let d = p.c_degree();
    if d == 0 {
        return Err(Error::InvalidInput(
            "direct Robin estimate needs degree at least 1".into(),
        ));
    }
    if lambdas.iter().any(|l| !(*l > 1.0) || !l.is_finite()) {
        return Err(Error::InvalidInput(
            "scaling ladder entries must be finite and > 1".into(),
        ));
    }
    let body = p.body();
    let ab = body.ab() as f64;
    let estimates = lambdas
        .iter()
        .map(|&l| {
            let scaled = crate::cpoly::circle_act(&body, Complex64::new(l, 0.0), z);
            let v = p.log_abs(scaled) / d as f64 - ab * l.ln();
            (l, v)
        })
        .collect();
    let hat = p.hat();
    let hat_value = if hat.is_zero() {
        f64::NEG_INFINITY
    } else {
        hat.log_abs(z) / d as f64
    };
    Ok(RobinLadder {
        estimates,
        hat_value,
    })
}

/// Shared modified Gram-Schmidt engine on weighted evaluation vectors with
/// coefficient mirroring. Each pivot runs a second orthogonalisation pass;
/// a residual below `1e-12` of its starting norm means the monomial is
/// numerically dependent on its predecessors over the support.
fn gram_schmidt_members(
    body: TriangleBody,
    n: u32,
    measure: &DiscreteMeasure,
    monic: bool,
) -> Result<Vec<FamilyMember>> {
    let basis = MultiIndexBasis::new(body, n);
    let support = measure.support();
    let pts = support.points();
    let w = measure.weights();
    if pts.len() < basis.len() {
        return Err(Error::TooFewPoints {
            context: "orthogonalisation",
            got: pts.len(),
            need: basis.len(),
        });
    }
    let raw = monomial_columns(&basis, pts);
    let mut scales = Vec::with_capacity(raw.len());
    let mut cols = Vec::with_capacity(raw.len());
    for (i, col) in raw.into_iter().enumerate() {
        let s = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::DependentMonomial {
                index: basis.indices()[i],
            });
        }
        cols.push(col.into_iter().map(|v| v / s).collect::<Vec<_>>());
        scales.push(s);
    }

    let wdot = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        let mut acc = ZERO;
        for ((xv, yv), wp) in x.iter().zip(y).zip(w) {
            acc += wp * xv.conj() * yv;
        }
        acc
    };
    let wnorm = |x: &[Complex64]| -> f64 {
        x.iter()
            .zip(w)
            .map(|(v, wp)| wp * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };

    // q: orthonormal evaluation vectors; qc: their coefficients in the
    // equilibrated monomials
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(basis.len());
    let mut qc: Vec<Vec<Complex64>> = Vec::with_capacity(basis.len());
    let mut members = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let mut r = cols[i].clone();
        let mut c = vec![ZERO; i + 1];
        c[i] = Complex64::new(1.0, 0.0);
        let init = wnorm(&r);
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let h = wdot(qj, &r);
                if h != ZERO {
                    for (rv, qv) in r.iter_mut().zip(qj) {
                        *rv -= h * qv;
                    }
                    for (cv, qv) in c.iter_mut().zip(&qc[j]) {
                        *cv -= h * qv;
                    }
                }
            }
        }
        let rn = wnorm(&r);
        if !(rn > 1e-12 * init) || !rn.is_finite() {
            return Err(Error::DependentMonomial {
                index: basis.indices()[i],
            });
        }

        // assemble the member in original monomial coordinates
        let coeff_iter = |cs: &[Complex64], denom: f64| -> CPolynomial {
            CPolynomial::from_terms(
                body,
                basis.indices()[..cs.len()]
                    .iter()
                    .zip(cs.iter().zip(&scales))
                    .map(|(&alpha, (cv, s))| (alpha, cv / (s * denom))),
            )
        };
        let polynomial = if monic {
            // the pivot entry of `c` is still exactly one (projections only
            // touch earlier monomials), so rescaling by the pivot's own
            // equilibration scale makes the leading coefficient exactly one
            coeff_iter(&c, 1.0 / scales[i])
        } else {
            coeff_iter(&c, rn)
        };
        let norm_on_k = support.sup_norm(&polynomial);
        members.push(FamilyMember::new(polynomial, norm_on_k)?);

        for v in r.iter_mut() {
            *v /= rn;
        }
        for cv in c.iter_mut() {
            *cv /= rn;
        }
        q.push(r);
        qc.push(c);
    }
    Ok(members)
}

/// Orthonormal family for the weighted discrete inner product: members are
/// unit vectors in `L^2(mu)` spanning the same graded flags as the monomials.
pub fn orthonormal_family(
    body: TriangleBody,
    n: u32,
    measure: &DiscreteMeasure,
) -> Result<PolynomialFamily> {
    let members = gram_schmidt_members(body, n, measure, false)?;
    PolynomialFamily::new(body, n, FamilyProvenance::Orthonormal, members)
}

/// Monic least-squares family: each member keeps coefficient one on its own
/// monomial and is `L^2(mu)`-orthogonal to all earlier monomials.
pub fn l2_monic_family(
    body: TriangleBody,
    n: u32,
    measure: &DiscreteMeasure,
) -> Result<PolynomialFamily> {
    let members = gram_schmidt_members(body, n, measure, true)?;
    PolynomialFamily::new(body, n, FamilyProvenance::L2Monic, members)
}

/// Per-member diagnostics of a Chebyshev family build.
#[derive(Debug, Clone)]
pub struct SolveStats {
    pub position: usize,
    pub iterations: usize,
    pub converged: bool,
    pub certified_gap: f64,
}

/// Monic Chebyshev family on `K`: one minimax solve per basis position,
/// sharing a single evaluation/Gram context. Member norms are the achieved
/// minimax values.
pub fn chebyshev_family(
    body: TriangleBody,
    n: u32,
    k: &DiscreteCompact,
    opts: SolverOptions,
) -> Result<(PolynomialFamily, Vec<SolveStats>)> {
    let ctx = MonicContext::new(body, k, n)?;
    let nb = ctx.basis().len();
    let solved: Result<Vec<_>> = (0..nb)
        .into_par_iter()
        .map(|pos| ctx.solve_position(pos, opts))
        .collect();
    let solved = solved?;
    let mut members = Vec::with_capacity(nb);
    let mut stats = Vec::with_capacity(nb);
    for (pos, sol) in solved.into_iter().enumerate() {
        stats.push(SolveStats {
            position: pos,
            iterations: sol.iterations,
            converged: sol.converged,
            certified_gap: sol.certified_gap,
        });
        members.push(FamilyMember::new(sol.polynomial, sol.value)?);
    }
    Ok((
        PolynomialFamily::new(body, n, FamilyProvenance::Chebyshev, members)?,
        stats,
    ))
}

/// Family from Newton-style difference polynomials on an ordered node set
/// (typically a Leja or greedy Fekete selection on `K`).
pub fn vdm_difference_family(
    body: TriangleBody,
    n: u32,
    k: &DiscreteCompact,
    nodes: &[CPoint],
) -> Result<PolynomialFamily> {
    let basis = MultiIndexBasis::new(body, n);
    let polys = crate::nodes::lagrange_difference_family(nodes, &basis)?;
    let members: Result<Vec<FamilyMember>> = polys
        .into_iter()
        .map(|p| {
            let norm = k.sup_norm(&p);
            FamilyMember::new(p, norm)
        })
        .collect();
    PolynomialFamily::new(body, n, FamilyProvenance::VdmDifference, members?)
}

/// Directional transfinite-diameter estimate: geometric mean of the
/// direction constants `tau` over equally weighted midpoint directions
/// `t = (i + 1/2) / n_dirs`.
#[derive(Debug, Clone)]
pub struct DirectionalDeltaEstimate {
    pub directions: Vec<TauEstimate>,
    pub log_delta: f64,
    pub delta: f64,
}

pub fn delta_zaharjuta(
    body: TriangleBody,
    k: &DiscreteCompact,
    n_dirs: u32,
    k_deg: u32,
    opts: SolverOptions,
) -> Result<DirectionalDeltaEstimate> {
    if n_dirs == 0 {
        return Err(Error::InvalidInput("need at least one direction".into()));
    }
    if k_deg == 0 {
        return Err(Error::InvalidInput(
            "direction solves need degree at least 1".into(),
        ));
    }
    let ctx = MonicContext::new(body, k, k_deg)?;
    let directions: Result<Vec<TauEstimate>> = (0..n_dirs)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) / n_dirs as f64;
            let theta = HypotenuseDirection::new(t)?;
            tau_direction_with(&ctx, &theta, &[k_deg], opts)
        })
        .collect();
    let directions = directions?;
    let log_delta = directions.iter().map(|d| d.tau.ln()).sum::<f64>() / n_dirs as f64;
    Ok(DirectionalDeltaEstimate {
        directions,
        log_delta,
        delta: log_delta.exp(),
    })
}

/// Pointwise comparison of the family envelope against a reference function.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub n_points: usize,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub worst_point: Option<CPoint>,
}

/// How well the family envelope recovers `reference` on `grid`. Points where
/// either side is non-finite (axis zeros of every member, say) are skipped
/// and not counted.
pub fn recovery_report(
    family: &PolynomialFamily,
    grid: &[CPoint],
    reference: impl Fn(CPoint) -> f64 + Sync,
) -> RecoveryReport {
    let diffs: Vec<(CPoint, f64)> = grid
        .par_iter()
        .filter_map(|z| {
            let e = upper_envelope(family, *z);
            let r = reference(*z);
            if e.is_finite() && r.is_finite() {
                Some((*z, (e - r).abs()))
            } else {
                None
            }
        })
        .collect();
    let mut max_abs = 0.0f64;
    let mut worst = None;
    let mut sum = 0.0f64;
    for (z, d) in &diffs {
        sum += d;
        if *d > max_abs {
            max_abs = *d;
            worst = Some(*z);
        }
    }
    RecoveryReport {
        n_points: diffs.len(),
        max_abs_diff: max_abs,
        mean_abs_diff: if diffs.is_empty() {
            0.0
        } else {
            sum / diffs.len() as f64
        },
        worst_point: worst,
    }
}

/// The exact extremal function of the torus `|z1| = r1, |z2| = r2`:
/// `max(b log+(|z1|/r1), a log+(|z2|/r2))`.
pub fn torus_extremal_reference(
    body: TriangleBody,
    r1: f64,
    r2: f64,
) -> Result<impl Fn(CPoint) -> f64> {
    if !(r1 > 0.0) || !(r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "torus radii must be positive finite, got ({r1}, {r2})"
        )));
    }
    let a = body.a() as f64;
    let b = body.b() as f64;
    Ok(move |z: CPoint| {
        let u = b * (z.z1.norm() / r1).ln().max(0.0);
        let v = a * (z.z2.norm() / r2).ln().max(0.0);
        u.max(v)
    })
}

/// Consistency report for circled sets: on each off-axis sphere-grid point
/// the envelope evaluated directly must agree with the Robin envelope pulled
/// back along the circle action (`z = mu . zeta` with `mu` chosen so the
/// larger normalised coordinate sits on the unit circle), clamped at zero.
#[derive(Debug, Clone)]
pub struct CircledIdentityReport {
    pub n_points: usize,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub worst_point: Option<CPoint>,
}

pub fn circled_identity_check(
    family: &PolynomialFamily,
    grid: &BoundaryGrid,
) -> Result<CircledIdentityReport> {
    let rf = RobinFamily::new(family);
    if rf.len() == 0 {
        return Err(Error::InvalidInput(
            "no member carries top-line information".into(),
        ));
    }
    let a = family.body.a() as f64;
    let b = family.body.b() as f64;
    let ab = family.body.ab() as f64;
    let pts: Vec<CPoint> = grid.off_axis_points().copied().collect();
    let diffs: Vec<(CPoint, f64)> = pts
        .par_iter()
        .filter_map(|z| {
            let direct = upper_envelope(family, *z);
            // normalise the coordinate with the larger weighted modulus onto
            // the unit circle; both are nonzero off the axes
            let mu = z.z1.norm().powf(1.0 / a).max(z.z2.norm().powf(1.0 / b));
            let zeta = CPoint::new(
                z.z1 / mu.powf(a),
                z.z2 / mu.powf(b),
            );
            let via_robin = (rf.at(zeta) + ab * mu.ln()).max(0.0);
            if direct.is_finite() && via_robin.is_finite() {
                Some((*z, (direct - via_robin).abs()))
            } else {
                None
            }
        })
        .collect();
    if diffs.is_empty() {
        return Err(Error::TooFewPoints {
            context: "circled identity check",
            got: 0,
            need: 1,
        });
    }
    let mut max_abs = 0.0f64;
    let mut worst = None;
    let mut sum = 0.0f64;
    for (z, d) in &diffs {
        sum += d;
        if *d > max_abs {
            max_abs = *d;
            worst = Some(*z);
        }
    }
    Ok(CircledIdentityReport {
        n_points: diffs.len(),
        max_abs_diff: max_abs,
        mean_abs_diff: sum / diffs.len() as f64,
        worst_point: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MultiIndex;
    use proptest::prelude::*;

    fn body11() -> TriangleBody {
        TriangleBody::new(1, 1).unwrap()
    }

    fn body23() -> TriangleBody {
        TriangleBody::new(2, 3).unwrap()
    }

    #[test]
    fn log_indicator_frozen_values() {
        let b = body23();
        assert_eq!(log_indicator(&b, CPoint::from_re(0.5, 0.9)), 0.0);
        let z = CPoint::from_re(std::f64::consts::E.powi(2), std::f64::consts::E.powi(3));
        assert!((log_indicator(&b, z) - 6.0).abs() < 1e-12);
        // only z1 outside: b * log|z1|
        let z = CPoint::from_re(std::f64::consts::E, 0.5);
        assert!((log_indicator(&b, z) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_family_on_unit_torus_is_monomial() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 8).unwrap();
        let mu = DiscreteMeasure::uniform(k);
        let fam = orthonormal_family(b, 2, &mu).unwrap();
        let basis = MultiIndexBasis::new(b, 2);
        assert_eq!(fam.len(), basis.len());
        for (i, m) in fam.members.iter().enumerate() {
            let alpha = basis.indices()[i];
            assert!((m.polynomial.coefficient(alpha) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            // rounding dust from the discrete phase sums may survive as
            // stray terms, but only at noise level
            for (beta, c) in m.polynomial.terms() {
                if beta != alpha {
                    assert!(c.norm() < 1e-12, "member {i} stray term {}", c.norm());
                }
            }
            assert!((m.norm_on_k - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn l2_monic_family_on_unit_torus_is_monomial() {
        let b = body23();
        let k = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let mu = DiscreteMeasure::uniform(k);
        let fam = l2_monic_family(b, 1, &mu).unwrap();
        let basis = MultiIndexBasis::new(b, 1);
        for (i, m) in fam.members.iter().enumerate() {
            assert_eq!(
                m.polynomial.coefficient(basis.indices()[i]),
                Complex64::new(1.0, 0.0)
            );
            for (alpha, c) in m.polynomial.terms() {
                if alpha != basis.indices()[i] {
                    assert!(c.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dependent_monomial_is_reported() {
        let b = body11();
        let pts: Vec<CPoint> = (0..8).map(|i| CPoint::from_re(i as f64, 0.0)).collect();
        let k = DiscreteCompact::from_points(pts, false, "slice").unwrap();
        let mu = DiscreteMeasure::uniform(k);
        let err = orthonormal_family(b, 1, &mu).unwrap_err();
        match err {
            Error::DependentMonomial { index } => {
                assert_eq!(index, MultiIndex::new(0, 1));
            }
            other => panic!("expected dependent monomial, got {other:?}"),
        }
    }

    #[test]
    fn chebyshev_family_on_unit_torus() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let (fam, stats) = chebyshev_family(b, 3, &k, SolverOptions::default()).unwrap();
        assert_eq!(fam.len(), MultiIndexBasis::new(b, 3).len());
        for (m, s) in fam.members.iter().zip(&stats) {
            assert!((m.norm_on_k - 1.0).abs() < 1e-9, "norm {}", m.norm_on_k);
            assert!(s.converged);
        }
    }

    #[test]
    fn envelope_matches_torus_reference_exactly_for_monomial_family() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let (fam, _) = chebyshev_family(b, 3, &k, SolverOptions::default()).unwrap();
        let reference = torus_extremal_reference(b, 1.0, 1.0).unwrap();
        for z in [
            CPoint::from_re(2.0, 2.0),
            CPoint::from_re(0.5, 0.5),
            CPoint::from_re(3.0, 0.2),
            CPoint::from_re(0.1, 5.0),
        ] {
            let e = upper_envelope(&fam, z);
            assert!(
                (e - reference(z)).abs() < 1e-8,
                "at ({}, {}): {} vs {}",
                z.z1,
                z.z2,
                e,
                reference(z)
            );
        }
    }

    #[test]
    fn envelope_is_zero_inside_unit_bidisc() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 10).unwrap();
        let (fam, _) = chebyshev_family(b, 2, &k, SolverOptions::default()).unwrap();
        let e = upper_envelope(&fam, CPoint::from_re(0.3, 0.6));
        assert!((e - 0.0).abs() < 1e-9, "envelope = {e}");
    }

    #[test]
    fn robin_envelope_can_be_negative_inside() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 10).unwrap();
        let (fam, _) = chebyshev_family(b, 3, &k, SolverOptions::default()).unwrap();
        let z = CPoint::from_re(0.5, 0.5);
        let r = robin_envelope(&fam, z);
        assert!(
            (r - 0.5f64.ln()).abs() < 1e-9,
            "robin = {r}, expected {}",
            0.5f64.ln()
        );
        let z = CPoint::from_re(0.5, 2.0);
        assert!((robin_envelope(&fam, z) - 2.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn robin_direct_ladder_converges_to_hat_value() {
        let b = body11();
        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(1, 0), Complex64::new(1.0, 0.0)),
                (MultiIndex::new(0, 2), Complex64::new(1.0, 0.0)),
            ],
        );
        let ladder = robin_direct(&p, CPoint::from_re(1.0, 1.0), &[10.0, 100.0, 1000.0]).unwrap();
        assert!((ladder.hat_value - 0.0).abs() < 1e-12);
        let errs: Vec<f64> = ladder
            .estimates
            .iter()
            .map(|(_, v)| (v - ladder.hat_value).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 1e-3);
    }

    #[test]
    fn zero_hat_members_are_skipped() {
        let b = body23();
        // z1 z2 sits strictly below the degree-1 top line for (2,3)
        let p = CPolynomial::monomial(b, MultiIndex::new(1, 1), Complex64::new(1.0, 0.0));
        let ladder = robin_direct(&p, CPoint::from_re(1.0, 1.0), &[10.0]).unwrap();
        assert_eq!(ladder.hat_value, f64::NEG_INFINITY);

        let member = FamilyMember::new(p, 1.0).unwrap();
        let axis = FamilyMember::new(
            CPolynomial::monomial(b, MultiIndex::new(3, 0), Complex64::new(1.0, 0.0)),
            1.0,
        )
        .unwrap();
        let fam = PolynomialFamily::new(b, 1, FamilyProvenance::Chebyshev, vec![member, axis])
            .unwrap();
        let rf = RobinFamily::new(&fam);
        assert_eq!(rf.len(), 1);
        // the surviving member is z1^3 with degree 1: value 3 log|z1| / 1...
        // via the top line weight normalisation
        let v = rf.at(CPoint::from_re(2.0, 1.0));
        assert!((v - 3.0 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn delta_zaharjuta_on_unit_torus_is_one() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let est = delta_zaharjuta(b, &k, 4, 3, SolverOptions::default()).unwrap();
        assert!(est.log_delta.abs() < 1e-9, "log delta = {}", est.log_delta);
        assert!((est.delta - 1.0).abs() < 1e-9);
        assert_eq!(est.directions.len(), 4);
    }

    #[test]
    fn delta_zaharjuta_scales_with_torus_radius() {
        let b = body11();
        let k = DiscreteCompact::torus(2.0, 2.0, 12).unwrap();
        let est = delta_zaharjuta(b, &k, 3, 2, SolverOptions::default()).unwrap();
        assert!((est.delta - 2.0).abs() < 1e-9, "delta = {}", est.delta);
    }

    #[test]
    fn circled_identity_holds_on_torus_families() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let (fam, _) = chebyshev_family(b, 3, &k, SolverOptions::default()).unwrap();
        let grid = BoundaryGrid::new(6).unwrap();
        let report = circled_identity_check(&fam, &grid).unwrap();
        assert!(report.n_points > 0);
        assert!(
            report.max_abs_diff < 1e-8,
            "max diff {}",
            report.max_abs_diff
        );
    }

    #[test]
    fn recovery_report_flags_wrong_reference() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 10).unwrap();
        let (fam, _) = chebyshev_family(b, 2, &k, SolverOptions::default()).unwrap();
        let grid = product_grid(0.5, 2.0, 3, 4).unwrap();
        let right = torus_extremal_reference(b, 1.0, 1.0).unwrap();
        let wrong = torus_extremal_reference(b, 2.0, 2.0).unwrap();
        let good = recovery_report(&fam, &grid, right);
        let bad = recovery_report(&fam, &grid, wrong);
        assert!(good.max_abs_diff < 1e-8, "good {}", good.max_abs_diff);
        assert!(bad.max_abs_diff > 0.1, "bad {}", bad.max_abs_diff);
        assert!(bad.worst_point.is_some());
    }

    #[test]
    fn product_grid_counts_and_validation() {
        let g = product_grid(0.5, 2.0, 3, 4).unwrap();
        assert_eq!(g.len(), 3 * 3 * 4 * 4);
        assert!(product_grid(0.0, 1.0, 2, 2).is_err());
        assert!(product_grid(2.0, 1.0, 2, 2).is_err());
        assert!(product_grid(1.0, 2.0, 0, 2).is_err());
        // single radius collapses to r_min
        let g1 = product_grid(1.5, 3.0, 1, 2).unwrap();
        assert!(g1.iter().all(|z| (z.z1.norm() - 1.5).abs() < 1e-12));
    }

    #[test]
    fn family_validation_rejects_bad_members() {
        let b = body11();
        let p = CPolynomial::monomial(b, MultiIndex::new(1, 0), Complex64::new(1.0, 0.0));
        assert!(FamilyMember::new(p.clone(), 0.0).is_err());
        assert!(FamilyMember::new(p.clone(), f64::INFINITY).is_err());
        let m = FamilyMember::new(p, 1.0).unwrap();
        // degree budget violation
        assert!(PolynomialFamily::new(b, 0, FamilyProvenance::Chebyshev, vec![m]).is_err());
        assert!(
            PolynomialFamily::new(b, 1, FamilyProvenance::Chebyshev, Vec::new()).is_err()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// The envelope only depends on coordinate moduli for families built
        /// on torus grids (phase rotations permute the defining data).
        #[test]
        fn envelope_is_phase_invariant_on_torus_families(
            r1 in 0.2f64..3.0,
            r2 in 0.2f64..3.0,
            t1 in 0.0f64..std::f64::consts::TAU,
            t2 in 0.0f64..std::f64::consts::TAU,
        ) {
            let b = body11();
            let k = DiscreteCompact::torus(1.0, 1.0, 8).unwrap();
            let (fam, _) = chebyshev_family(b, 2, &k, SolverOptions::default()).unwrap();
            let z0 = CPoint::from_re(r1, r2);
            let z1 = CPoint::new(
                Complex64::from_polar(r1, t1),
                Complex64::from_polar(r2, t2),
            );
            let e0 = upper_envelope(&fam, z0);
            let e1 = upper_envelope(&fam, z1);
            prop_assert!((e0 - e1).abs() < 1e-8, "{e0} vs {e1}");
        }
    }
}
