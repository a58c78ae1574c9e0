//! Small dense complex linear-algebra kernels used by the solvers: pivoted LU
//! (log-scale determinants and square solves), Householder least squares, and
//! Hermitian Cholesky. Everything is column-count-at-most-a-few-hundred scale,
//! so simple O(n^3) loops are fine; determinants are only ever accumulated as
//! sums of pivot log-moduli.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub(crate) struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

}

/// `sum_i conj(x_i) y_i`.
#[inline]
pub(crate) fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut acc = ZERO;
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// `log |det|` of a square matrix via row-equilibrated partially pivoted LU.
/// Returns `-inf` for an exactly singular matrix. The determinant itself is
/// never formed.
pub(crate) fn log_abs_det(mat: &CMat) -> f64 {
    assert_eq!(mat.rows, mat.cols, "log_abs_det needs a square matrix");
    let n = mat.rows;
    if n == 0 {
        return 0.0;
    }
    let mut a = mat.data.clone();
    let mut acc = 0.0f64;
    // factor out per-row max moduli first
    for i in 0..n {
        let mut s = 0.0f64;
        for j in 0..n {
            s = s.max(a[i * n + j].norm());
        }
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        let inv = 1.0 / s;
        for j in 0..n {
            a[i * n + j] *= inv;
        }
        acc += s.ln();
    }
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm();
        for r in (k + 1)..n {
            let v = a[r * n + k].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return f64::NEG_INFINITY;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
        }
        let pivot = a[k * n + k];
        acc += pivot.norm().ln();
        for r in (k + 1)..n {
            let f = a[r * n + k] / pivot;
            if f != ZERO {
                for j in (k + 1)..n {
                    let v = a[k * n + j];
                    a[r * n + j] -= f * v;
                }
            }
            a[r * n + k] = ZERO;
        }
    }
    acc
}

/// LU factorisation with partial pivoting, for repeated square solves.
pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(mat: &CMat) -> Result<Self> {
        assert_eq!(mat.rows, mat.cols);
        let n = mat.rows;
        let mut a = mat.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm();
            for r in (k + 1)..n {
                let v = a[r * n + k].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(Error::RankDeficient { column: k });
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = a[k * n + k];
            for r in (k + 1)..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                if f != ZERO {
                    for j in (k + 1)..n {
                        let v = a[k * n + j];
                        a[r * n + j] -= f * v;
                    }
                }
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let v = x[j];
                x[i] -= l * v;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let v = x[j];
                x[i] -= u * v;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

/// Least squares `min ||A c - b||_2` by complex Householder QR. `a` and `b`
/// are consumed (overwritten in place). Returns the coefficients and the
/// residual 2-norm. Rank deficiency is reported with the offending column.
pub(crate) fn householder_lstsq(a: &mut CMat, b: &mut [Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let m = a.rows;
    let n = a.cols;
    assert!(m >= n, "need at least as many rows as columns");
    assert_eq!(b.len(), m);

    let mut col_scale = 0.0f64;
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..m {
            s += a.at(i, j).norm_sqr();
        }
        col_scale = col_scale.max(s.sqrt());
    }
    let rank_tol = 1e-13 * col_scale.max(f64::MIN_POSITIVE);

    let mut v = vec![ZERO; m];
    for k in 0..n {
        let mut norm_sq = 0.0f64;
        for i in k..m {
            norm_sq += a.at(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= rank_tol {
            return Err(Error::RankDeficient { column: k });
        }
        let x0 = a.at(k, k);
        let phase = if x0 == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        // v = x - alpha e1 on the active block
        let mut vnorm_sq = 0.0f64;
        for i in k..m {
            let vi = if i == k { a.at(i, k) - alpha } else { a.at(i, k) };
            v[i] = vi;
            vnorm_sq += vi.norm_sqr();
        }
        if vnorm_sq > 0.0 {
            let beta = 2.0 / vnorm_sq;
            for j in k..n {
                let mut dot = ZERO;
                for i in k..m {
                    dot += v[i].conj() * a.at(i, j);
                }
                let f = beta * dot;
                for i in k..m {
                    let av = a.at(i, j) - f * v[i];
                    a.set(i, j, av);
                }
            }
            let mut dot = ZERO;
            for i in k..m {
                dot += v[i].conj() * b[i];
            }
            let f = beta * dot;
            for i in k..m {
                b[i] -= f * v[i];
            }
        }
        a.set(k, k, alpha);
        for i in (k + 1)..m {
            a.set(i, k, ZERO);
        }
    }

    let mut c = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a.at(i, j) * c[j];
        }
        c[i] = acc / a.at(i, i);
    }
    let mut res_sq = 0.0f64;
    for i in n..m {
        res_sq += b[i].norm_sqr();
    }
    Ok((c, res_sq.sqrt()))
}

/// Hermitian positive-definite Cholesky `G = L L^H` (lower factor). The
/// offending column index is reported when a pivot fails.
pub(crate) fn cholesky(g: &CMat) -> Result<CMat> {
    assert_eq!(g.rows, g.cols);
    let n = g.rows;
    let mut max_diag = 0.0f64;
    for k in 0..n {
        max_diag = max_diag.max(g.at(k, k).re.abs());
    }
    let tol = 1e-13 * max_diag.max(f64::MIN_POSITIVE) * n as f64;
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = g.at(i, j);
            for t in 0..j {
                acc -= l.at(i, t) * l.at(j, t).conj();
            }
            if i == j {
                let d = acc.re;
                if d <= tol {
                    return Err(Error::RankDeficient { column: i });
                }
                l.set(i, i, Complex64::new(d.sqrt(), 0.0));
            } else {
                let v = acc / l.at(j, j);
                l.set(i, j, v);
            }
        }
    }
    Ok(l)
}

/// Solves `L[..s][..s] L^H x = rhs` using the leading block of a Cholesky
/// factor (valid because leading blocks of `L` factor leading blocks of `G`).
pub(crate) fn cholesky_prefix_solve(l: &CMat, s: usize, rhs: &[Complex64]) -> Vec<Complex64> {
    assert!(s <= l.rows);
    assert_eq!(rhs.len(), s);
    let mut y = rhs.to_vec();
    for i in 0..s {
        for j in 0..i {
            let v = y[j];
            y[i] -= l.at(i, j) * v;
        }
        y[i] /= l.at(i, i);
    }
    for i in (0..s).rev() {
        for j in (i + 1)..s {
            let v = y[j];
            y[i] -= l.at(j, i).conj() * v;
        }
        y[i] /= l.at(i, i);
    }
    y
}
