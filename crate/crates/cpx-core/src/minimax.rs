//! Discrete Chebyshev-type minimax problems: given a fixed polynomial part
//! `f` and free basis polynomials `q_1..q_m`, minimise
//! `max_{z in K} |f(z) + sum_i c_i q_i(z)|` over complex coefficients, with an
//! optional linear constraint `sum_i g_i c_i = t`.
//!
//! The solver is Lawson-style iteratively reweighted least squares. Each
//! iteration solves a weighted least-squares problem (normal equations with a
//! Householder fallback), multiplies the weights by the residual moduli and
//! renormalises. Two stopping rules run side by side:
//!
//! * the weighted L2 minimum is a lower bound for the minimax value at any
//!   weight vector, so once `max|r| - bound <= tol * max|r|` the current
//!   iterate is optimal to within `tol` and the solve stops with a
//!   certificate;
//! * otherwise, the solve declares convergence when the objective has moved
//!   by less than a relative `tol` over five consecutive iterations.
//!
//! The best iterate seen is returned either way. Free-basis columns are
//! rescaled to unit sup-norm on `K` internally (with coefficients mapped
//! back), which keeps the normal equations well conditioned for strongly
//! graded monomial bases; weights are floored at `1e-300` so a point whose
//! residual vanishes can re-enter later.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cpoly::{CPoint, CPolynomial};
use crate::domain::DiscreteCompact;
use crate::error::{Error, Result};
use crate::lattice::{HypotenuseDirection, MultiIndex, MultiIndexBasis, TriangleBody};
use crate::linalg::{cholesky, cholesky_prefix_solve, householder_lstsq, CMat};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const WEIGHT_FLOOR: f64 = 1e-300;

/// Linear constraint `sum_i g_i c_i = t` on the free coefficients.
#[derive(Debug, Clone)]
pub struct CoefficientConstraint {
    pub functional: Vec<Complex64>,
    pub target: Complex64,
}

/// A minimax instance over a discrete compact.
#[derive(Debug, Clone)]
pub struct MinimaxProblem {
    pub fixed_part: CPolynomial,
    pub free_basis: Vec<CPolynomial>,
    pub constraint: Option<CoefficientConstraint>,
}

/// Iteration controls. `tol` drives both stopping rules.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 400,
        }
    }
}

/// Result of a minimax solve. `value` is the achieved objective of the best
/// iterate; `certified_gap` is the remaining optimality gap guaranteed by the
/// Lawson lower bound (0 means proven optimal to working precision).
#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    pub coefficients: Vec<Complex64>,
    pub polynomial: CPolynomial,
    pub value: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub certified_gap: f64,
}

/// Dense data for the Lawson loop: fixed values and equilibrated columns.
struct DenseProblem {
    f: Vec<Complex64>,
    cols: Vec<Vec<Complex64>>,
    scales: Vec<f64>,
}

struct LawsonOutcome {
    coeffs: Vec<Complex64>,
    value: f64,
    iterations: usize,
    history: Vec<f64>,
    converged: bool,
    certified_gap: f64,
}

/// Precomputed first (uniform-weight) iterate, used by the bulk monic path.
struct WarmStart {
    coeffs: Vec<Complex64>,
    residual: Vec<Complex64>,
}

fn residual_of(f: &[Complex64], cols: &[Vec<Complex64>], c: &[Complex64]) -> Vec<Complex64> {
    let mut r = f.to_vec();
    for (ci, col) in c.iter().zip(cols) {
        if *ci != ZERO {
            for (rp, ap) in r.iter_mut().zip(col) {
                *rp += ci * ap;
            }
        }
    }
    r
}

/// Weighted least squares `min sum w_p |f_p + (A c)_p|^2` via normal
/// equations, falling back to scaled Householder QR when Cholesky fails.
fn weighted_ls(
    f: &[Complex64],
    cols: &[Vec<Complex64>],
    w: &[f64],
) -> Result<Vec<Complex64>> {
    let m = cols.len();
    let npts = f.len();
    let mut g = CMat::zeros(m, m);
    let mut rhs = vec![ZERO; m];
    let entries: Vec<(usize, usize, Complex64)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut acc = ZERO;
            for p in 0..npts {
                acc += w[p] * cols[i][p].conj() * cols[j][p];
            }
            (i, j, acc)
        })
        .collect();
    for (i, j, v) in entries {
        g.set(i, j, v);
        if i != j {
            g.set(j, i, v.conj());
        }
    }
    for i in 0..m {
        let mut acc = ZERO;
        for p in 0..npts {
            acc += w[p] * cols[i][p].conj() * f[p];
        }
        rhs[i] = -acc;
    }
    match cholesky(&g) {
        Ok(l) => Ok(cholesky_prefix_solve(&l, m, &rhs)),
        Err(_) => {
            let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            let mut a = CMat::from_fn(npts, m, |p, i| sw[p] * cols[i][p]);
            let mut b: Vec<Complex64> = (0..npts).map(|p| -(sw[p] * f[p])).collect();
            let (c, _) = householder_lstsq(&mut a, &mut b)?;
            Ok(c)
        }
    }
}

fn lawson(
    dense: &DenseProblem,
    opts: SolverOptions,
    warm: Option<WarmStart>,
) -> Result<LawsonOutcome> {
    let npts = dense.f.len();
    let m = dense.cols.len();
    if m == 0 {
        let value = dense.f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(LawsonOutcome {
            coeffs: Vec::new(),
            value,
            iterations: 0,
            history: Vec::new(),
            converged: true,
            certified_gap: 0.0,
        });
    }

    let mut w = vec![1.0 / npts as f64; npts];
    let mut best_coeffs: Vec<Complex64> = Vec::new();
    let mut best_value = f64::INFINITY;
    let mut history = Vec::new();
    let mut lower = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;

    let mut pending = warm;
    while iterations < opts.max_iter {
        iterations += 1;
        let (c, r) = match pending.take() {
            Some(ws) => (ws.coeffs, ws.residual),
            None => {
                let c = weighted_ls(&dense.f, &dense.cols, &w)?;
                let r = residual_of(&dense.f, &dense.cols, &c);
                (c, r)
            }
        };
        let obj = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let l2: f64 = r
            .iter()
            .zip(&w)
            .map(|(v, wp)| wp * v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        lower = lower.max(l2);
        history.push(obj);
        if obj < best_value {
            best_value = obj;
            best_coeffs = c;
        }
        // certified optimality: the weighted L2 optimum bounds the minimax
        // value from below at any weights
        if best_value - lower <= opts.tol * best_value.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        // plateau rule: five consecutive relative changes below tol
        if history.len() >= 6 {
            let tail = &history[history.len() - 6..];
            let plateau = tail.windows(2).all(|p| {
                (p[1] - p[0]).abs() <= opts.tol * p[0].max(f64::MIN_POSITIVE)
            });
            if plateau {
                converged = true;
                break;
            }
        }
        let mut total = 0.0f64;
        for (wp, rv) in w.iter_mut().zip(&r) {
            *wp = (*wp * rv.norm()).max(WEIGHT_FLOOR);
            total += *wp;
        }
        for wp in w.iter_mut() {
            *wp /= total;
        }
    }

    let gap = (best_value - lower).max(0.0);
    Ok(LawsonOutcome {
        coeffs: best_coeffs,
        value: best_value,
        iterations,
        history,
        converged,
        certified_gap: gap,
    })
}

/// Evaluates a polynomial on all points; errors if any value is non-finite.
fn eval_column(p: &CPolynomial, pts: &[CPoint]) -> Result<Vec<Complex64>> {
    let col: Vec<Complex64> = pts.iter().map(|z| p.evaluate_raw(*z)).collect();
    if col
        .iter()
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::Overflow);
    }
    Ok(col)
}

/// Record of a constraint elimination: which column was pivoted out and the
/// ratios needed to reconstruct its coefficient afterwards.
struct Eliminated {
    pivot: usize,
    g_over_gp: Vec<Complex64>, // g_j / g_p for the retained columns, aligned with dense cols
    t_over_gp: Complex64,
    retained: Vec<usize>, // original indices of retained columns
}

/// Builds the dense problem: evaluates the free basis, eliminates the
/// constraint if present, and equilibrates columns.
fn build_dense(
    fixed: &CPolynomial,
    basis: &[CPolynomial],
    k: &DiscreteCompact,
    constraint: Option<&CoefficientConstraint>,
) -> Result<(DenseProblem, Option<Eliminated>)> {
    let pts = k.points();
    let f0 = eval_column(fixed, pts)?;
    let mut raw_cols = Vec::with_capacity(basis.len());
    for q in basis {
        raw_cols.push(eval_column(q, pts)?);
    }
    let sup: Vec<f64> = raw_cols
        .iter()
        .map(|c| c.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();

    let (f, cols_raw, scales, elim) = match constraint {
        None => {
            for (i, s) in sup.iter().enumerate() {
                if *s == 0.0 {
                    return Err(Error::RankDeficient { column: i });
                }
            }
            (f0, raw_cols, sup, None)
        }
        Some(con) => {
            if con.functional.len() != basis.len() {
                return Err(Error::InvalidInput(format!(
                    "constraint functional has {} entries for {} basis polynomials",
                    con.functional.len(),
                    basis.len()
                )));
            }
            // pivot on the largest |g_i| * sup-norm product
            let mut pivot = None;
            let mut best = 0.0f64;
            for (i, g) in con.functional.iter().enumerate() {
                let score = g.norm() * sup[i];
                if score > best {
                    best = score;
                    pivot = Some(i);
                }
            }
            let pivot = pivot.ok_or(Error::Infeasible)?;
            let gp = con.functional[pivot];
            let t_over_gp = con.target / gp;
            let pivot_col = raw_cols[pivot].clone();
            let mut f = f0;
            for (fp, ap) in f.iter_mut().zip(&pivot_col) {
                *fp += t_over_gp * ap;
            }
            let mut cols = Vec::new();
            let mut scales = Vec::new();
            let mut g_over_gp = Vec::new();
            let mut retained = Vec::new();
            for (i, col) in raw_cols.into_iter().enumerate() {
                if i == pivot {
                    continue;
                }
                let ratio = con.functional[i] / gp;
                let reduced: Vec<Complex64> = col
                    .iter()
                    .zip(&pivot_col)
                    .map(|(a, p)| a - ratio * p)
                    .collect();
                let s = reduced.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if s == 0.0 {
                    return Err(Error::RankDeficient { column: i });
                }
                cols.push(reduced);
                scales.push(s);
                g_over_gp.push(ratio);
                retained.push(i);
            }
            (
                f,
                cols,
                scales,
                Some(Eliminated {
                    pivot,
                    g_over_gp,
                    t_over_gp,
                    retained,
                }),
            )
        }
    };

    let cols: Vec<Vec<Complex64>> = cols_raw
        .into_iter()
        .zip(&scales)
        .map(|(col, s)| col.into_iter().map(|v| v / s).collect())
        .collect();
    Ok((
        DenseProblem {
            f,
            cols,
            scales,
        },
        elim,
    ))
}

/// Solves the minimax instance on `K`.
///
/// Preconditions checked here: at least `|free_basis| + 1` points, matching
/// bodies, full column rank of the (constraint-reduced) evaluation matrix.
pub fn solve_minimax(
    problem: &MinimaxProblem,
    k: &DiscreteCompact,
    opts: SolverOptions,
) -> Result<MinimaxSolution> {
    for q in &problem.free_basis {
        if q.body() != problem.fixed_part.body() {
            return Err(Error::BodyMismatch {
                a1: problem.fixed_part.body().a(),
                b1: problem.fixed_part.body().b(),
                a2: q.body().a(),
                b2: q.body().b(),
            });
        }
    }
    if k.len() < problem.free_basis.len() + 1 {
        return Err(Error::TooFewPoints {
            context: "minimax solve",
            got: k.len(),
            need: problem.free_basis.len() + 1,
        });
    }
    let (dense, elim) = build_dense(
        &problem.fixed_part,
        &problem.free_basis,
        k,
        problem.constraint.as_ref(),
    )?;
    let outcome = lawson(&dense, opts, None)?;

    // map equilibrated coefficients back, and reinsert the pivot coefficient
    let reduced: Vec<Complex64> = outcome
        .coeffs
        .iter()
        .zip(&dense.scales)
        .map(|(c, s)| c / s)
        .collect();
    let coefficients = match &elim {
        None => reduced,
        Some(e) => {
            let mut full = vec![ZERO; problem.free_basis.len()];
            let mut acc = e.t_over_gp;
            for (pos, &orig) in e.retained.iter().enumerate() {
                full[orig] = reduced[pos];
                acc -= e.g_over_gp[pos] * reduced[pos];
            }
            full[e.pivot] = acc;
            full
        }
    };

    let mut polynomial = problem.fixed_part.clone();
    for (c, q) in coefficients.iter().zip(&problem.free_basis) {
        polynomial.add_scaled(*c, q)?;
    }
    Ok(MinimaxSolution {
        coefficients,
        polynomial,
        value: outcome.value,
        iterations: outcome.iterations,
        residual_history: outcome.history,
        converged: outcome.converged,
        certified_gap: outcome.certified_gap,
    })
}

/// Monic Chebyshev data for one top-position solve.
#[derive(Debug, Clone)]
pub struct MonicChebyshev {
    pub alpha: MultiIndex,
    pub k: u32,
    pub solution: MinimaxSolution,
    /// `value^(1/k)`.
    pub t_value: f64,
}

/// Shared evaluation data for monic solves over prefixes of one graded basis:
/// the full monomial evaluation matrix on `K` (columns sup-normalised), its
/// Gram matrix and Cholesky factor. Leading blocks of the factor solve every
/// prefix least-squares problem, so the first Lawson iterate of each monic
/// problem costs only a pair of triangular solves.
pub struct MonicContext {
    body: TriangleBody,
    basis: MultiIndexBasis,
    points: Vec<CPoint>,
    cols: Vec<Vec<Complex64>>,
    scales: Vec<f64>,
    chol: Option<CMat>,
    gram: Option<CMat>,
}

impl MonicContext {
    pub fn new(body: TriangleBody, k: &DiscreteCompact, n: u32) -> Result<Self> {
        let basis = MultiIndexBasis::new(body, n);
        let pts = k.points().to_vec();
        let npts = pts.len();
        let nb = basis.len();
        let mut cols = crate::cpoly::monomial_columns(&basis, &pts);
        let mut scales = Vec::with_capacity(nb);
        for (i, col) in cols.iter_mut().enumerate() {
            let s = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if s == 0.0 || !s.is_finite() {
                return Err(Error::RankDeficient { column: i });
            }
            for v in col.iter_mut() {
                *v /= s;
            }
            scales.push(s);
        }
        let (gram, chol) = if npts >= nb {
            let entries: Vec<(usize, usize, Complex64)> = (0..nb)
                .into_par_iter()
                .flat_map_iter(|i| (0..=i).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let mut acc = ZERO;
                    for p in 0..npts {
                        acc += cols[i][p].conj() * cols[j][p];
                    }
                    (i, j, acc)
                })
                .collect();
            let mut g = CMat::zeros(nb, nb);
            for (i, j, v) in entries {
                g.set(i, j, v);
                if i != j {
                    g.set(j, i, v.conj());
                }
            }
            let l = cholesky(&g).ok();
            (Some(g), l)
        } else {
            (None, None)
        };
        Ok(MonicContext {
            body,
            basis,
            points: pts,
            cols,
            scales,
            chol,
            gram,
        })
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn body(&self) -> TriangleBody {
        self.body
    }

    /// Sup-norm of the `i`-th monomial on `K` (the equilibration scale).
    pub fn monomial_sup(&self, i: usize) -> f64 {
        self.scales[i]
    }

    /// Solves the monic problem at basis position `pos`: monomial `pos` fixed
    /// with coefficient one, all earlier monomials free.
    pub fn solve_position(&self, pos: usize, opts: SolverOptions) -> Result<MinimaxSolution> {
        assert!(pos < self.basis.len());
        let npts = self.points.len();
        if npts < pos + 1 {
            return Err(Error::TooFewPoints {
                context: "monic solve",
                got: npts,
                need: pos + 1,
            });
        }
        let s_pos = self.scales[pos];
        let f: Vec<Complex64> = self.cols[pos].iter().map(|v| v * s_pos).collect();
        let dense = DenseProblem {
            f: f.clone(),
            cols: self.cols[..pos].to_vec(),
            scales: self.scales[..pos].to_vec(),
        };
        let warm = match (&self.chol, &self.gram) {
            (Some(l), Some(g)) if pos > 0 => {
                let rhs: Vec<Complex64> = (0..pos).map(|i| -(s_pos * g.at(i, pos))).collect();
                let coeffs = cholesky_prefix_solve(l, pos, &rhs);
                let residual = residual_of(&f, &dense.cols, &coeffs);
                Some(WarmStart { coeffs, residual })
            }
            _ => None,
        };
        let outcome = lawson(&dense, opts, warm)?;
        let coefficients: Vec<Complex64> = outcome
            .coeffs
            .iter()
            .zip(&dense.scales)
            .map(|(c, s)| c / s)
            .collect();
        let mut polynomial = CPolynomial::monomial(
            self.body,
            self.basis.indices()[pos],
            Complex64::new(1.0, 0.0),
        );
        for (c, alpha) in coefficients.iter().zip(self.basis.indices()) {
            if *c != ZERO {
                polynomial.add_scaled(*c, &CPolynomial::monomial(self.body, *alpha, Complex64::new(1.0, 0.0)))?;
            }
        }
        Ok(MinimaxSolution {
            coefficients,
            polynomial,
            value: outcome.value,
            iterations: outcome.iterations,
            residual_history: outcome.history,
            converged: outcome.converged,
            certified_gap: outcome.certified_gap,
        })
    }
}

/// Monic Chebyshev polynomial for the class of `alpha` inside degree `k`: the
/// monomial `z^alpha` plus a best correction supported on the strictly
/// earlier monomials. Errors if `alpha` is outside `kC`.
pub fn chebyshev_monic(
    body: TriangleBody,
    k_deg: u32,
    alpha: MultiIndex,
    k: &DiscreteCompact,
    opts: SolverOptions,
) -> Result<MonicChebyshev> {
    let ctx = MonicContext::new(body, k, k_deg)?;
    chebyshev_monic_with(&ctx, k_deg, alpha, opts)
}

/// Same as [`chebyshev_monic`] but reusing a prepared context (the context
/// degree must be at least `k_deg`).
pub fn chebyshev_monic_with(
    ctx: &MonicContext,
    k_deg: u32,
    alpha: MultiIndex,
    opts: SolverOptions,
) -> Result<MonicChebyshev> {
    if ctx.body.c_degree(alpha) > k_deg {
        return Err(Error::InvalidInput(format!(
            "index ({}, {}) has degree {} > {}",
            alpha.j,
            alpha.k,
            ctx.body.c_degree(alpha),
            k_deg
        )));
    }
    let pos = ctx
        .basis
        .position(alpha)
        .ok_or_else(|| Error::InvalidInput("index outside context basis".into()))?;
    let solution = ctx.solve_position(pos, opts)?;
    let t_value = solution.value.powf(1.0 / k_deg as f64);
    Ok(MonicChebyshev {
        alpha,
        k: k_deg,
        solution,
        t_value,
    })
}

/// Best sup-norm approximation of `-h` from the polynomials of one degree
/// less: returns `h + correction` minimising the norm. `h` must be nonzero
/// and supported on its own top line.
pub fn tch_projection(
    h: &CPolynomial,
    k: &DiscreteCompact,
    opts: SolverOptions,
) -> Result<MinimaxSolution> {
    if h.is_zero() {
        return Err(Error::InvalidInput("top-line part must be nonzero".into()));
    }
    let body = h.body();
    let n = h.c_degree();
    let line = n as u64 * body.ab();
    if h.terms().any(|(alpha, _)| body.weight(alpha) != line) {
        return Err(Error::InvalidInput(
            "polynomial has terms off its top line".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let lower = MultiIndexBasis::new(body, n - 1);
    let free: Vec<CPolynomial> = lower
        .indices()
        .iter()
        .map(|&alpha| CPolynomial::monomial(body, alpha, Complex64::new(1.0, 0.0)))
        .collect();
    let problem = MinimaxProblem {
        fixed_part: h.clone(),
        free_basis: free,
        constraint: None,
    };
    solve_minimax(&problem, k, opts)
}

/// The degree-`n` Chebyshev constant of `K` at `zeta`: minimal sup-norm over
/// polynomials of `nC` whose top-line part takes the value 1 at `zeta`.
pub fn kappa_n(
    body: TriangleBody,
    n: u32,
    k: &DiscreteCompact,
    zeta: CPoint,
    opts: SolverOptions,
) -> Result<MinimaxSolution> {
    if n == 0 {
        return Err(Error::InvalidInput("kappa needs n >= 1".into()));
    }
    let basis = MultiIndexBasis::new(body, n);
    let line = n as u64 * body.ab();
    let free: Vec<CPolynomial> = basis
        .indices()
        .iter()
        .map(|&alpha| CPolynomial::monomial(body, alpha, Complex64::new(1.0, 0.0)))
        .collect();
    let functional: Vec<Complex64> = basis
        .indices()
        .iter()
        .map(|&alpha| {
            if body.weight(alpha) == line {
                crate::cpoly::cpow(zeta.z1, alpha.j) * crate::cpoly::cpow(zeta.z2, alpha.k)
            } else {
                ZERO
            }
        })
        .collect();
    if functional.iter().all(|g| g.norm() == 0.0) {
        return Err(Error::Infeasible);
    }
    let problem = MinimaxProblem {
        fixed_part: CPolynomial::zero(body),
        free_basis: free,
        constraint: Some(CoefficientConstraint {
            functional,
            target: Complex64::new(1.0, 0.0),
        }),
    };
    solve_minimax(&problem, k, opts)
}

/// Chebyshev data along one hypotenuse direction: for each `k` in `k_list`
/// the nearest edge index and its normalised value `T_k^(1/k)`; the direction
/// estimate `tau` is the largest-`k` entry.
#[derive(Debug, Clone)]
pub struct TauEstimate {
    pub theta_t: f64,
    pub per_k: Vec<MonicChebyshev>,
    pub tau: f64,
}

pub fn tau_direction(
    body: TriangleBody,
    k: &DiscreteCompact,
    theta: &HypotenuseDirection,
    k_list: &[u32],
    opts: SolverOptions,
) -> Result<TauEstimate> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "degree list must be nonempty strictly ascending".into(),
        ));
    }
    let n_max = *k_list.last().unwrap();
    let ctx = MonicContext::new(body, k, n_max)?;
    tau_direction_with(&ctx, theta, k_list, opts)
}

/// As [`tau_direction`] with a shared context (degree at least `max(k_list)`).
pub fn tau_direction_with(
    ctx: &MonicContext,
    theta: &HypotenuseDirection,
    k_list: &[u32],
    opts: SolverOptions,
) -> Result<TauEstimate> {
    let mut per_k = Vec::with_capacity(k_list.len());
    for &kk in k_list {
        let alpha = ctx.body.direction_index(theta, kk);
        per_k.push(chebyshev_monic_with(ctx, kk, alpha, opts)?);
    }
    let tau = per_k.last().unwrap().t_value;
    Ok(TauEstimate {
        theta_t: theta.t(),
        per_k,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body11() -> TriangleBody {
        TriangleBody::new(1, 1).unwrap()
    }

    fn mono(body: TriangleBody, j: u32, k: u32) -> CPolynomial {
        CPolynomial::monomial(body, MultiIndex::new(j, k), Complex64::new(1.0, 0.0))
    }

    fn segment_k(n: usize) -> DiscreteCompact {
        let pts: Vec<CPoint> = (0..n)
            .map(|i| CPoint::from_re(-1.0 + 2.0 * i as f64 / (n - 1) as f64, 0.0))
            .collect();
        DiscreteCompact::from_points(pts, false, "segment").unwrap()
    }

    #[test]
    fn constant_shift_on_circle() {
        // min over c of max |z1 + c| on the unit circle is 1 at c = 0
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let problem = MinimaxProblem {
            fixed_part: mono(b, 1, 0),
            free_basis: vec![CPolynomial::constant(b, Complex64::new(1.0, 0.0))],
            constraint: None,
        };
        let sol = solve_minimax(&problem, &k, SolverOptions::default()).unwrap();
        assert!(sol.coefficients[0].norm() < 1e-6, "c = {}", sol.coefficients[0]);
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!(sol.converged);
    }

    #[test]
    fn recovers_scaled_chebyshev_t2() {
        // min max |x^2 + c1 x + c0| on [-1,1] -> x^2 - 1/2, value 1/2
        let b = body11();
        let k = segment_k(41);
        let problem = MinimaxProblem {
            fixed_part: mono(b, 2, 0),
            free_basis: vec![CPolynomial::constant(b, Complex64::new(1.0, 0.0)), mono(b, 1, 0)],
            constraint: None,
        };
        let opts = SolverOptions {
            tol: 1e-12,
            max_iter: 2000,
        };
        let sol = solve_minimax(&problem, &k, opts).unwrap();
        assert!((sol.value - 0.5).abs() < 1e-6, "value = {}", sol.value);
        assert!((sol.coefficients[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-4);
        assert!(sol.coefficients[1].norm() < 1e-6);
    }

    #[test]
    fn empty_free_basis_short_circuits() {
        let b = body11();
        let k = DiscreteCompact::torus(2.0, 1.0, 8).unwrap();
        let problem = MinimaxProblem {
            fixed_part: mono(b, 1, 0),
            free_basis: vec![],
            constraint: None,
        };
        let sol = solve_minimax(&problem, &k, SolverOptions::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert!((sol.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let b = body11();
        let k = DiscreteCompact::from_points(vec![CPoint::from_re(1.0, 0.0)], false, "pt").unwrap();
        let problem = MinimaxProblem {
            fixed_part: mono(b, 1, 0),
            free_basis: vec![CPolynomial::constant(b, Complex64::new(1.0, 0.0))],
            constraint: None,
        };
        assert!(matches!(
            solve_minimax(&problem, &k, SolverOptions::default()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let b = body11();
        // z2 vanishes identically on the segment
        let k = segment_k(11);
        let problem = MinimaxProblem {
            fixed_part: mono(b, 2, 0),
            free_basis: vec![mono(b, 0, 1)],
            constraint: None,
        };
        assert!(matches!(
            solve_minimax(&problem, &k, SolverOptions::default()),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn monic_on_torus_is_the_monomial() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let t = chebyshev_monic(b, 3, MultiIndex::new(2, 1), &k, SolverOptions::default()).unwrap();
        assert!((t.solution.value - 1.0).abs() < 1e-10);
        // correction coefficients are numerically zero
        for c in &t.solution.coefficients {
            assert!(c.norm() < 1e-10);
        }
        assert!(t.solution.converged);
        assert!(t.solution.certified_gap <= 1e-10);
        assert_eq!(t.solution.iterations, 1);
    }

    #[test]
    fn monic_on_scaled_torus_matches_radius_power() {
        let b = body11();
        let k = DiscreteCompact::torus(0.5, 2.0, 16).unwrap();
        let t = chebyshev_monic(b, 4, MultiIndex::new(1, 3), &k, SolverOptions::default()).unwrap();
        let expect = 0.5f64.powi(1) * 2.0f64.powi(3);
        assert!((t.solution.value - expect).abs() < 1e-9 * expect);
        assert!((t.t_value - expect.powf(0.25)).abs() < 1e-9);
    }

    #[test]
    fn tch_projection_validates_input() {
        let b = TriangleBody::new(2, 3).unwrap();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        // z1 z2 is not supported on its top line for (2,3)
        let h = mono(b, 1, 1);
        assert!(tch_projection(&h, &k, SolverOptions::default()).is_err());
        assert!(tch_projection(&CPolynomial::zero(b), &k, SolverOptions::default()).is_err());
    }

    #[test]
    fn tch_projection_torus_needs_no_correction() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let h = mono(b, 1, 1);
        let sol = tch_projection(&h, &k, SolverOptions::default()).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-9);
        for c in &sol.coefficients {
            assert!(c.norm() < 1e-8);
        }
    }

    #[test]
    fn tch_projection_scales_positively() {
        let b = body11();
        let k = segment_k(41);
        // h = z1^2 restricted to the segment gives the Chebyshev correction -1/2
        let h = mono(b, 2, 0);
        let opts = SolverOptions {
            tol: 1e-12,
            max_iter: 2000,
        };
        let s1 = tch_projection(&h, &k, opts);
        // the free basis contains z2 which vanishes on the segment, so the
        // solve must report rank deficiency rather than silently continuing
        assert!(matches!(s1, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn kappa_on_unit_torus_is_one() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 16).unwrap();
        let sol = kappa_n(b, 3, &k, CPoint::from_re(1.0, 1.0), SolverOptions::default()).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6, "kappa_3 = {}", sol.value);
        // the constraint holds at the solution
        let line = 3u64 * b.ab();
        let hat = sol.polynomial.homogeneous_part(line);
        let v = hat.evaluate(CPoint::from_re(1.0, 1.0)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn kappa_feasible_at_axis_points() {
        let b = TriangleBody::new(2, 3).unwrap();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        // zeta on the z2 axis: the top line of n=1 is {(3,0),(0,2)} and z2^2
        // stays nonzero there
        let sol = kappa_n(b, 1, &k, CPoint::from_re(0.0, 1.0), SolverOptions::default()).unwrap();
        assert!(sol.value <= 1.0 + 1e-9);
    }

    #[test]
    fn tau_on_torus_is_radius_power() {
        let b = body11();
        let k = DiscreteCompact::torus(0.7, 0.7, 16).unwrap();
        let theta = HypotenuseDirection::new(0.5).unwrap();
        let est = tau_direction(b, &k, &theta, &[2, 4, 6], SolverOptions::default()).unwrap();
        assert!((est.tau - 0.7).abs() < 1e-9, "tau = {}", est.tau);
        for mc in &est.per_k {
            assert!((mc.t_value - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn value_matches_recomputed_sup_norm() {
        let b = body11();
        let k = DiscreteCompact::torus(1.0, 1.0, 12).unwrap();
        let problem = MinimaxProblem {
            fixed_part: mono(b, 2, 0),
            free_basis: vec![
                CPolynomial::constant(b, Complex64::new(1.0, 0.0)),
                mono(b, 1, 0),
                mono(b, 0, 1),
            ],
            constraint: None,
        };
        let sol = solve_minimax(&problem, &k, SolverOptions::default()).unwrap();
        let recomputed = k.sup_norm(&sol.polynomial);
        assert!((sol.value - recomputed).abs() <= 1e-12 * recomputed.max(1.0));
    }
}
