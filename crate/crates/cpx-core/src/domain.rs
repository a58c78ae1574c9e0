//! Discrete compacts in C^2: torus grids, Reinhardt unions, weighted point
//! sets, and a sampled version of the boundary sphere
//! `{max(|z1|, |z2|) = 1}` used for Robin-function work.
//!
//! Points are deduplicated exactly (bit-for-bit) so that grid constructions
//! stay deterministic and refinement `m -> 2m` keeps the coarse grid as a
//! subset of the fine one.

use num_complex::Complex64;

use crate::cpoly::{circle_act, CPoint, CPolynomial};
use crate::error::{Error, Result};
use crate::lattice::TriangleBody;

/// Defect threshold for deciding whether a sampled set is closed under the
/// weighted circle action.
pub const CIRCLED_DEFECT_TOL: f64 = 1e-9;

fn point_key(p: &CPoint) -> (u64, u64, u64, u64) {
    (
        p.z1.re.to_bits(),
        p.z1.im.to_bits(),
        p.z2.re.to_bits(),
        p.z2.im.to_bits(),
    )
}

fn dedup_points(points: Vec<CPoint>) -> Vec<CPoint> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        if seen.insert(point_key(&p)) {
            out.push(p);
        }
    }
    out
}

/// A finite point set standing in for a compact set `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCompact {
    points: Vec<CPoint>,
    circled: bool,
    label: String,
}

impl DiscreteCompact {
    /// Wraps explicit points; `circled` records whether the caller claims
    /// closure under the weighted circle action (see
    /// [`circled_closure_test`] for the check).
    pub fn from_points(points: Vec<CPoint>, circled: bool, label: impl Into<String>) -> Result<Self> {
        let points = dedup_points(points);
        if points.is_empty() {
            return Err(Error::TooFewPoints {
                context: "discrete compact",
                got: 0,
                need: 1,
            });
        }
        for p in &points {
            if !(p.z1.re.is_finite() && p.z1.im.is_finite() && p.z2.re.is_finite() && p.z2.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite point coordinate".into()));
            }
        }
        Ok(DiscreteCompact {
            points,
            circled,
            label: label.into(),
        })
    }

    /// The product torus `{|z1| = r1} x {|z2| = r2}` sampled with `m` uniform
    /// phases per coordinate (`m*m` points).
    pub fn torus(r1: f64, r2: f64, m: u32) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "torus radii must be positive finite, got ({r1}, {r2})"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidInput("torus needs at least one phase".into()));
        }
        let mut points = Vec::with_capacity((m * m) as usize);
        for s in 0..m {
            let phi1 = std::f64::consts::TAU * (s as f64 / m as f64);
            let z1 = Complex64::from_polar(r1, phi1);
            for t in 0..m {
                let phi2 = std::f64::consts::TAU * (t as f64 / m as f64);
                points.push(CPoint::new(z1, Complex64::from_polar(r2, phi2)));
            }
        }
        Self::from_points(points, true, format!("torus({r1},{r2},{m})"))
    }

    /// Union of product tori with the given radius profile, all sampled with
    /// `m_phase` phases per coordinate.
    pub fn reinhardt(profile: &[(f64, f64)], m_phase: u32) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::InvalidInput("empty Reinhardt profile".into()));
        }
        let mut points = Vec::new();
        for &(r1, r2) in profile {
            let t = Self::torus(r1, r2, m_phase)?;
            points.extend_from_slice(t.points());
        }
        Self::from_points(points, true, format!("reinhardt({} tori,{m_phase})", profile.len()))
    }

    pub fn points(&self) -> &[CPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn circled(&self) -> bool {
        self.circled
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Scales every point by `(r * z1, r * z2)`; the label records the factor.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| CPoint::new(p.z1 * r, p.z2 * r))
            .collect();
        Self::from_points(points, self.circled, format!("{}*{}", self.label, r))
    }

    /// `max_K |p|` through log-scale evaluation; 0 for the zero polynomial.
    pub fn sup_norm(&self, p: &CPolynomial) -> f64 {
        self.sup_log_abs(p).exp()
    }

    /// `max_K log|p|`; `-inf` for the zero polynomial.
    pub fn sup_log_abs(&self, p: &CPolynomial) -> f64 {
        let mut mx = f64::NEG_INFINITY;
        for z in &self.points {
            let v = p.log_abs(*z);
            if v > mx {
                mx = v;
            }
        }
        mx
    }
}

/// A positive measure with finite support: weights are normalised to total
/// mass one, the original mass is kept for reporting.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    support: DiscreteCompact,
    weights: Vec<f64>,
    original_mass: f64,
}

impl DiscreteMeasure {
    pub fn uniform(support: DiscreteCompact) -> Self {
        let n = support.len();
        DiscreteMeasure {
            support,
            weights: vec![1.0 / n as f64; n],
            original_mass: n as f64,
        }
    }

    pub fn from_weights(support: DiscreteCompact, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != support.len() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} support points",
                raw.len(),
                support.len()
            )));
        }
        if raw.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidInput(
                "measure weights must be positive and finite".into(),
            ));
        }
        let mass: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / mass).collect();
        Ok(DiscreteMeasure {
            support,
            weights,
            original_mass: mass,
        })
    }

    pub fn support(&self) -> &DiscreteCompact {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn original_mass(&self) -> f64 {
        self.original_mass
    }
}

/// One-sided closure defect of `K` under the weighted circle action: samples
/// `n_theta` uniform angles, maps every point, and measures the worst
/// Euclidean distance back to `K`. Passes when the defect is at most
/// [`CIRCLED_DEFECT_TOL`].
///
/// Cost is `n_theta * |K|^2`; intended for grids up to a few thousand points.
pub fn circled_closure_test(
    body: &TriangleBody,
    k: &DiscreteCompact,
    n_theta: u32,
) -> (bool, f64) {
    use rayon::prelude::*;
    assert!(n_theta >= 8, "need at least 8 sample angles");
    let pts = k.points();
    let mut defect: f64 = 0.0;
    for s in 0..n_theta {
        let theta = std::f64::consts::TAU * (s as f64 / n_theta as f64);
        let lam = Complex64::from_polar(1.0, theta);
        let worst = pts
            .par_iter()
            .map(|&z| {
                let w = circle_act(body, lam, z);
                let mut best = f64::INFINITY;
                for q in pts {
                    let d1 = w.z1 - q.z1;
                    let d2 = w.z2 - q.z2;
                    let d = d1.norm_sqr() + d2.norm_sqr();
                    if d < best {
                        best = d;
                    }
                }
                best
            })
            .reduce(|| 0.0f64, f64::max);
        defect = defect.max(worst.sqrt());
    }
    (defect <= CIRCLED_DEFECT_TOL, defect)
}

/// Sampled boundary sphere `{max(|z1|,|z2|) = 1}`: two facets
/// `{|z1| = 1, |z2| = s}` and `{|z1| = s, |z2| = 1}` with `s` running over a
/// hybrid linear + geometric grid in `[0, 1]` (both endpoints included, so
/// axis points `s = 0` are present) and uniform phases.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    points: Vec<CPoint>,
    m: u32,
}

impl BoundaryGrid {
    pub fn new(m: u32) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidInput(format!(
                "boundary grid needs m >= 4, got {m}"
            )));
        }
        let mut s_values: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let mut g = 0.5f64;
        while g * m as f64 > 1.0 {
            s_values.push(g);
            g *= 0.5;
        }
        s_values.sort_by(|x, y| x.partial_cmp(y).unwrap());
        s_values.dedup();

        let phases: Vec<Complex64> = (0..m)
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * (t as f64 / m as f64)))
            .collect();
        let mut points = Vec::new();
        for &s in &s_values {
            for &u in &phases {
                for &v in &phases {
                    // facet |z1| = 1
                    points.push(CPoint::new(u, v * s));
                    // facet |z2| = 1
                    points.push(CPoint::new(u * s, v));
                }
            }
        }
        let points = dedup_points(points);
        Ok(BoundaryGrid { points, m })
    }

    pub fn points(&self) -> &[CPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Whether `z` lies on the boundary sphere within `tol`.
    pub fn on_sphere(z: &CPoint, tol: f64) -> bool {
        (z.z1.norm().max(z.z2.norm()) - 1.0).abs() <= tol
    }

    /// Points with both coordinates nonzero; Robin quantities are best read
    /// away from the axes.
    pub fn off_axis_points(&self) -> impl Iterator<Item = &CPoint> {
        self.points
            .iter()
            .filter(|p| p.z1.norm() > 1e-14 && p.z2.norm() > 1e-14)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MultiIndex;

    fn body(a: u32, b: u32) -> TriangleBody {
        TriangleBody::new(a, b).unwrap()
    }

    #[test]
    fn torus_counts_and_moduli() {
        let t = DiscreteCompact::torus(1.0, 1.0, 8).unwrap();
        assert_eq!(t.len(), 64);
        for p in t.points() {
            assert!((p.z1.norm() - 1.0).abs() <= 1e-12);
            assert!((p.z2.norm() - 1.0).abs() <= 1e-12);
        }
        assert!(t.circled());

        let t2 = DiscreteCompact::torus(0.5, 2.0, 5).unwrap();
        assert_eq!(t2.len(), 25);
        for p in t2.points() {
            assert!((p.z1.norm() - 0.5).abs() <= 1e-12);
            assert!((p.z2.norm() - 2.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn torus_refinement_nests() {
        let coarse = DiscreteCompact::torus(1.0, 1.0, 8).unwrap();
        let fine = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let keys: std::collections::HashSet<_> = fine.points().iter().map(point_key).collect();
        for p in coarse.points() {
            assert!(keys.contains(&point_key(p)), "coarse point missing in fine grid");
        }
    }

    #[test]
    fn reinhardt_union_counts() {
        let k = DiscreteCompact::reinhardt(&[(1.0, 0.5), (0.5, 1.0)], 6).unwrap();
        assert_eq!(k.len(), 72);
        // duplicated profile entries collapse
        let k2 = DiscreteCompact::reinhardt(&[(1.0, 0.5), (1.0, 0.5)], 6).unwrap();
        assert_eq!(k2.len(), 36);
    }

    #[test]
    fn circled_test_passes_on_compatible_grids() {
        let b = body(2, 3);
        let k = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let (ok, defect) = circled_closure_test(&b, &k, 8);
        assert!(ok, "defect = {defect}");
        assert!(defect <= 1e-12);

        let r = DiscreteCompact::reinhardt(&[(1.0, 0.4), (0.3, 1.0)], 16).unwrap();
        let (ok, defect) = circled_closure_test(&b, &r, 8);
        assert!(ok, "defect = {defect}");
    }

    #[test]
    fn circled_test_fails_on_noncircled_sets() {
        let b = body(1, 1);
        let single = DiscreteCompact::from_points(
            vec![CPoint::from_re(1.0, 1.0)],
            false,
            "single",
        )
        .unwrap();
        let (ok, defect) = circled_closure_test(&b, &single, 8);
        assert!(!ok);
        assert!(defect > 0.1);

        // {z1 = 1} x {|z2| = 1}: rotating z1 leaves the slice
        let mut pts = Vec::new();
        for t in 0..12 {
            let phi = std::f64::consts::TAU * t as f64 / 12.0;
            pts.push(CPoint::new(
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, phi),
            ));
        }
        let slice = DiscreteCompact::from_points(pts, false, "slice").unwrap();
        let (ok, _) = circled_closure_test(&b, &slice, 8);
        assert!(!ok);
    }

    #[test]
    fn sup_norm_frozen_examples() {
        let b = body(1, 1);
        let t = DiscreteCompact::torus(1.0, 1.0, 8).unwrap();
        let z1 = CPolynomial::monomial(b, MultiIndex::new(1, 0), Complex64::new(1.0, 0.0));
        assert!((t.sup_norm(&z1) - 1.0).abs() < 1e-12);

        let p = CPolynomial::from_terms(
            b,
            [
                (MultiIndex::new(1, 1), Complex64::new(1.0, 0.0)),
                (MultiIndex::new(0, 0), Complex64::new(1.0, 0.0)),
            ],
        );
        // phases align at (1,1), giving |1 + 1| = 2
        assert!((t.sup_norm(&p) - 2.0).abs() < 1e-12);

        assert_eq!(t.sup_norm(&CPolynomial::zero(b)), 0.0);
    }

    #[test]
    fn sup_norm_monotone_under_refinement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let b = body(2, 3);
        for _ in 0..10 {
            let terms: Vec<_> = (0..6)
                .map(|_| {
                    (
                        MultiIndex::new(rng.gen_range(0..5), rng.gen_range(0..4)),
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let p = CPolynomial::from_terms(b, terms);
            let coarse = DiscreteCompact::torus(0.9, 1.1, 8).unwrap();
            let fine = DiscreteCompact::torus(0.9, 1.1, 16).unwrap();
            assert!(fine.sup_norm(&p) >= coarse.sup_norm(&p) - 1e-15);
        }
    }

    #[test]
    fn measure_normalisation() {
        let k = DiscreteCompact::torus(1.0, 1.0, 4).unwrap();
        let mu = DiscreteMeasure::uniform(k.clone());
        let total: f64 = mu.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(mu.original_mass(), 16.0);

        let raw: Vec<f64> = (0..16).map(|i| 1.0 + i as f64).collect();
        let mu2 = DiscreteMeasure::from_weights(k.clone(), raw).unwrap();
        let total2: f64 = mu2.weights().iter().sum();
        assert!((total2 - 1.0).abs() < 1e-12);

        assert!(DiscreteMeasure::from_weights(k.clone(), vec![1.0; 3]).is_err());
        let mut bad = vec![1.0; 16];
        bad[5] = -2.0;
        assert!(DiscreteMeasure::from_weights(k, bad).is_err());
    }

    #[test]
    fn boundary_grid_contents() {
        let g = BoundaryGrid::new(8).unwrap();
        // contains the distinguished corner (1,1), and the axis points (1,0),(0,1)
        let has = |x: CPoint| {
            g.points()
                .iter()
                .any(|p| (p.z1 - x.z1).norm() < 1e-15 && (p.z2 - x.z2).norm() < 1e-15)
        };
        assert!(has(CPoint::from_re(1.0, 1.0)));
        assert!(has(CPoint::from_re(1.0, 0.0)));
        assert!(has(CPoint::from_re(0.0, 1.0)));
        for p in g.points() {
            assert!(BoundaryGrid::on_sphere(p, 1e-12));
        }
        // off-axis filter drops the axis points
        assert!(g.off_axis_points().count() < g.len());
        assert!(g.off_axis_points().count() > 0);

        assert!(BoundaryGrid::new(3).is_err());
    }

    #[test]
    fn boundary_grid_modulus_pairs_fixed_under_action() {
        let g = BoundaryGrid::new(8).unwrap();
        let b = body(2, 3);
        let lam = Complex64::from_polar(1.0, 0.9);
        for p in g.points().iter().step_by(7) {
            let q = circle_act(&b, lam, *p);
            assert!((q.z1.norm() - p.z1.norm()).abs() < 1e-12);
            assert!((q.z2.norm() - p.z2.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_set_scales_points() {
        let t = DiscreteCompact::torus(1.0, 1.0, 4).unwrap();
        let s = t.scaled(2.0).unwrap();
        for (p, q) in t.points().iter().zip(s.points()) {
            assert_eq!(q.z1, p.z1 * 2.0);
            assert_eq!(q.z2, p.z2 * 2.0);
        }
    }
}
