//! Independent reference implementations. Everything here prefers obvious
//! exhaustive computation over speed and shares no code path with the
//! solvers it checks: the minimax oracle is a zooming grid search over raw
//! coefficient space, the Fekete oracle enumerates all node subsets.

use itertools::Itertools;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::cpoly::{CPoint, CPolynomial};
use crate::domain::DiscreteCompact;
use crate::error::{Error, Result};
use crate::lattice::{MultiIndexBasis, TriangleBody};
use crate::minimax::MinimaxProblem;
use crate::nodes::vdm_log_abs;

/// Dense zooming grid search for the minimax objective
/// `min_c max_K |f + sum c_i q_i|`, for at most two complex coefficients
/// (four real dimensions). Each round grids the current box, then shrinks
/// each dimension to the span of every grid point whose value is within the
/// half-cell Lipschitz slack of the round minimum, padded by half a cell.
/// The objective is a max of moduli of affine maps, so that slack is a valid
/// bound and the true minimiser can never leave the box — narrow valleys
/// keep their long dimension until they actually resolve. A final stage of
/// golden-section line minimisations along seeded random directions cleans
/// up whatever slow dimensions remain (a 1-d convex slice is unimodal, so
/// the line searches are exact). Returns the best value seen.
pub fn minimax_grid_oracle(
    problem: &MinimaxProblem,
    k: &DiscreteCompact,
    init_radius: f64,
    rounds: usize,
    points_per_dim: usize,
) -> Result<f64> {
    let nfree = problem.free_basis.len();
    if nfree == 0 || nfree > 2 {
        return Err(Error::InvalidInput(format!(
            "grid oracle handles 1 or 2 free coefficients, got {nfree}"
        )));
    }
    if problem.constraint.is_some() {
        return Err(Error::InvalidInput(
            "grid oracle does not handle constraints".into(),
        ));
    }
    if points_per_dim < 3 || rounds == 0 {
        return Err(Error::InvalidInput("oracle needs >= 3 points, >= 1 round".into()));
    }
    let pts = k.points();
    let f: Vec<Complex64> = pts.iter().map(|z| problem.fixed_part.evaluate_raw(*z)).collect();
    let cols: Vec<Vec<Complex64>> = problem
        .free_basis
        .iter()
        .map(|q| pts.iter().map(|z| q.evaluate_raw(*z)).collect())
        .collect();
    // per-real-dimension Lipschitz constants: moving Re or Im of c_i by s
    // moves every residual by at most s * sup|q_i|
    let lip: Vec<f64> = cols
        .iter()
        .flat_map(|col| {
            let sup = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
            [sup, sup]
        })
        .collect();

    let objective = |c: &[Complex64]| -> f64 {
        let mut worst = 0.0f64;
        for p in 0..pts.len() {
            let mut v = f[p];
            for (ci, col) in c.iter().zip(&cols) {
                v += ci * col[p];
            }
            worst = worst.max(v.norm());
        }
        worst
    };

    let dims = 2 * nfree;
    let ppd = points_per_dim;
    let mut lo = vec![-init_radius; dims];
    let mut hi = vec![init_radius; dims];
    let mut best = f64::INFINITY;
    let mut best_x = vec![0.0f64; dims];
    let mut values = vec![0.0f64; ppd.pow(dims as u32)];
    let coord = |axes: &[Vec<f64>], flat: usize, d: usize| axes[d][(flat / ppd.pow(d as u32)) % ppd];
    for _ in 0..rounds {
        let axes: Vec<Vec<f64>> = (0..dims)
            .map(|d| {
                (0..ppd)
                    .map(|i| lo[d] + (hi[d] - lo[d]) * i as f64 / (ppd - 1) as f64)
                    .collect()
            })
            .collect();
        let cells: Vec<f64> = (0..dims).map(|d| (hi[d] - lo[d]) / (ppd - 1) as f64).collect();
        for (flat, slot) in values.iter_mut().enumerate() {
            let c: Vec<Complex64> = (0..nfree)
                .map(|i| {
                    Complex64::new(coord(&axes, flat, 2 * i), coord(&axes, flat, 2 * i + 1))
                })
                .collect();
            *slot = objective(&c);
        }
        let (min_flat, round_min) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .expect("grid is nonempty");
        if round_min < best {
            best = round_min;
            best_x = (0..dims).map(|d| coord(&axes, min_flat, d)).collect();
        }
        // slack covering the worst value change across half a grid cell: the
        // grid point nearest the true minimiser is at most cell/2 away per
        // dimension, so it scores within tau of the optimum and is kept
        let tau: f64 = cells
            .iter()
            .zip(&lip)
            .map(|(s, l)| 0.5 * s * l)
            .sum::<f64>()
            + 1e-12 * (1.0 + round_min.abs());
        let mut new_lo = vec![f64::INFINITY; dims];
        let mut new_hi = vec![f64::NEG_INFINITY; dims];
        for (flat, v) in values.iter().enumerate() {
            if *v <= round_min + tau {
                for d in 0..dims {
                    let x = coord(&axes, flat, d);
                    new_lo[d] = new_lo[d].min(x - 0.5 * cells[d]);
                    new_hi[d] = new_hi[d].max(x + 0.5 * cells[d]);
                }
            }
        }
        // the minimiser sits in the old box too, so intersecting never loses
        // it and stops flat rounds from inflating the search region
        for d in 0..dims {
            lo[d] = new_lo[d].max(lo[d]);
            hi[d] = new_hi[d].min(hi[d]);
        }
        if tau <= 1e-9 * (1.0 + best.abs()) {
            break;
        }
    }

    let line_objective = |x: &[f64], dir: &[f64], t: f64| -> f64 {
        let c: Vec<Complex64> = (0..nfree)
            .map(|i| {
                Complex64::new(
                    x[2 * i] + t * dir[2 * i],
                    x[2 * i + 1] + t * dir[2 * i + 1],
                )
            })
            .collect();
        objective(&c)
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x09ac1e);
    let mut width = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| h - l)
        .fold(1e-3 * (1.0 + best.abs()), f64::max);
    let mut stale_sweeps = 0usize;
    while stale_sweeps < 14 && width > 1e-12 * (1.0 + best.abs()) {
        let mut improved = false;
        for _ in 0..24 {
            let mut dir: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            dir.iter_mut().for_each(|v| *v /= norm);
            let (t, v) = golden_min(|t| line_objective(&best_x, &dir, t), -width, width);
            if v < best {
                if best - v > 1e-13 * (1.0 + best.abs()) {
                    improved = true;
                }
                best = v;
                for d in 0..dims {
                    best_x[d] += t * dir[d];
                }
            }
        }
        if improved {
            stale_sweeps = 0;
        } else {
            stale_sweeps += 1;
            width *= 0.3;
        }
    }

    // random probing stalls when the descent cone is thin, which is routine
    // for a max of moduli near its minimiser. Finish with steepest descent
    // for max-functions: the direction is the negated min-norm element of
    // the convex hull of near-active gradients, with the activation band
    // shrinking as the point converges.
    let point_vals = |x: &[f64]| -> Vec<Complex64> {
        let c: Vec<Complex64> = (0..nfree)
            .map(|i| Complex64::new(x[2 * i], x[2 * i + 1]))
            .collect();
        (0..pts.len())
            .map(|p| {
                let mut v = f[p];
                for (ci, col) in c.iter().zip(&cols) {
                    v += ci * col[p];
                }
                v
            })
            .collect()
    };
    let scale = 1.0 + best.abs();
    let mut band = 1e-2 * scale;
    let search_width = init_radius.max(1.0);
    for _ in 0..400 {
        let rs = point_vals(&best_x);
        let fx = rs.iter().map(|r| r.norm()).fold(0.0, f64::max);
        if fx < best {
            best = fx;
        }
        // gradients of |r_p| in the real coordinates, for the band of
        // points within `band` of the max
        let mut active: Vec<(f64, usize)> = rs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.norm() >= fx - band)
            .map(|(p, r)| (r.norm(), p))
            .collect();
        active.sort_by(|a, b| b.0.total_cmp(&a.0));
        active.truncate(7);
        let grads: Vec<Vec<f64>> = active
            .iter()
            .map(|&(norm, p)| {
                let cr = rs[p].conj() / norm;
                (0..nfree)
                    .flat_map(|i| {
                        let g = cr * cols[i][p];
                        [g.re, -g.im]
                    })
                    .collect()
            })
            .collect();
        let g = min_norm_in_hull(&grads);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm <= 1e-9 {
            band *= 0.25;
            if band < 1e-9 * scale {
                break;
            }
            continue;
        }
        let dir: Vec<f64> = g.iter().map(|v| -v / gnorm).collect();
        let (t, v) = golden_min(|t| line_objective(&best_x, &dir, t), 0.0, search_width);
        if v < best {
            best = v;
            for d in 0..dims {
                best_x[d] += t * dir[d];
            }
        } else {
            band *= 0.25;
            if band < 1e-9 * scale {
                break;
            }
        }
    }
    Ok(best)
}

/// Min-norm point of the convex hull of `vs`, by brute force over support
/// subsets: each subset contributes its affine least-norm combination when
/// the weights are nonnegative. Sized for a handful of vectors.
fn min_norm_in_hull(vs: &[Vec<f64>]) -> Vec<f64> {
    let k = vs.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let m = idx.len();
        // KKT system for min ||sum w_i v_i||^2 with sum w_i = 1
        let mut a = vec![vec![0.0f64; m + 1]; m + 1];
        let mut rhs = vec![0.0f64; m + 1];
        for r in 0..m {
            for c in 0..m {
                a[r][c] = 2.0 * dot(&vs[idx[r]], &vs[idx[c]]);
            }
            a[r][m] = 1.0;
            a[m][r] = 1.0;
        }
        rhs[m] = 1.0;
        let Some(sol) = solve_dense_real(&mut a, &mut rhs) else {
            continue;
        };
        if sol[..m].iter().any(|w| *w < -1e-12) {
            continue;
        }
        let dims = vs[0].len();
        let mut point = vec![0.0f64; dims];
        for (w, &i) in sol[..m].iter().zip(&idx) {
            for d in 0..dims {
                point[d] += w * vs[i][d];
            }
        }
        let n2 = dot(&point, &point);
        if best.as_ref().map_or(true, |(b, _)| n2 < *b) {
            best = Some((n2, point));
        }
    }
    best.expect("singleton subsets always solve").1
}

/// Gaussian elimination with partial pivoting on a small real system,
/// in-place. Returns `None` when the matrix is numerically singular.
fn solve_dense_real(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`, run to
/// interval widths far below f64 noise. Returns `(argmin, min)`.
fn golden_min(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..90 {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, g(mid))
}

/// Exhaustive Fekete: tries every `|basis|`-subset of the candidates and
/// returns the best log-determinant (with the first maximiser in the
/// enumeration order). Only viable for tiny bases.
pub fn exhaustive_fekete(
    candidates: &DiscreteCompact,
    basis: &MultiIndexBasis,
) -> Result<(Vec<usize>, f64)> {
    let pts = candidates.points();
    let nb = basis.len();
    if pts.len() < nb {
        return Err(Error::TooFewPoints {
            context: "exhaustive Fekete",
            got: pts.len(),
            need: nb,
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_subset = Vec::new();
    for subset in (0..pts.len()).combinations(nb) {
        let chosen: Vec<CPoint> = subset.iter().map(|&i| pts[i]).collect();
        let v = vdm_log_abs(&chosen, basis)?;
        if v > best {
            best = v;
            best_subset = subset;
        }
    }
    Ok((best_subset, best))
}

/// Random polynomial supported in `nC` with degree exactly `n`: one
/// uniformly chosen top-line index is always present (so the top-line part
/// is nonzero), every other index joins with probability one half.
/// Coefficients are uniform in the complex unit box.
pub fn random_polynomial(
    rng: &mut impl Rng,
    body: TriangleBody,
    n: u32,
) -> CPolynomial {
    let basis = MultiIndexBasis::new(body, n);
    let line = body.homogeneous_line(n);
    let anchor = line[rng.gen_range(0..line.len())];
    let mut terms = Vec::new();
    for &alpha in basis.indices() {
        let on = alpha == anchor || rng.gen_bool(0.5);
        if on {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if c.norm() > 0.0 {
                terms.push((alpha, c));
            }
        }
    }
    if !terms.iter().any(|(a, _)| *a == anchor) {
        terms.push((anchor, Complex64::new(1.0, 0.0)));
    }
    CPolynomial::from_terms(body, terms)
}

/// Random point cloud with log-uniform moduli in `[r_min, r_max]` and
/// uniform phases.
pub fn random_cloud(
    rng: &mut impl Rng,
    count: usize,
    r_min: f64,
    r_max: f64,
) -> Result<DiscreteCompact> {
    let lo = r_min.ln();
    let hi = r_max.ln();
    let pts: Vec<CPoint> = (0..count)
        .map(|_| {
            let m1 = (lo + (hi - lo) * rng.gen::<f64>()).exp();
            let m2 = (lo + (hi - lo) * rng.gen::<f64>()).exp();
            CPoint::new(
                Complex64::from_polar(m1, rng.gen_range(0.0..std::f64::consts::TAU)),
                Complex64::from_polar(m2, rng.gen_range(0.0..std::f64::consts::TAU)),
            )
        })
        .collect();
    DiscreteCompact::from_points(pts, false, "random cloud")
}
