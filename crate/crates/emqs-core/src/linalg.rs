//! Dense linear algebra at desk scale: LU factorization with partial
//! pivoting, symmetric eigenvalues via Householder tridiagonalization and
//! implicit-shift QL, and a pivoted row-echelon rank.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DMat { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.ncols + c]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for c in 0..self.ncols {
                acc += self.get(r, c) * x[c];
            }
            y[r] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = DMat::zeros(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let v = self.get(r, k);
                if v == 0.0 {
                    continue;
                }
                for c in 0..other.ncols {
                    *out.get_mut(r, c) += v * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DMat {
        let mut out = DMat::zeros(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                *out.get_mut(c, r) = self.get(r, c);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| if fabs(v) > m { fabs(v) } else { m })
    }

    pub fn max_abs_diff(&self, other: &DMat) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (&a, &b)| if fabs(a - b) > m { fabs(a - b) } else { m })
    }

    /// Numerical rank by Gaussian elimination with full row pivoting and a
    /// relative tolerance.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let mut a = self.clone();
        let scale = a.max_abs();
        if scale == 0.0 {
            return 0;
        }
        let tol = rel_tol * scale;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..a.ncols {
            if row >= a.nrows {
                break;
            }
            let mut piv = row;
            for r in row..a.nrows {
                if fabs(a.get(r, col)) > fabs(a.get(piv, col)) {
                    piv = r;
                }
            }
            if fabs(a.get(piv, col)) <= tol {
                continue;
            }
            for c in 0..a.ncols {
                let tmp = a.get(row, c);
                *a.get_mut(row, c) = a.get(piv, c);
                *a.get_mut(piv, c) = tmp;
            }
            for r in row + 1..a.nrows {
                let f = a.get(r, col) / a.get(row, col);
                if f != 0.0 {
                    for c in col..a.ncols {
                        *a.get_mut(r, c) -= f * a.get(row, c);
                    }
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }
}

/// LU factorization with partial pivoting.
pub struct LuFactors {
    lu: DMat,
    perm: Vec<usize>,
}

/// Factors a square matrix; reports the first numerically zero pivot.
pub fn lu_factor(a: &DMat, context: &str) -> Result<LuFactors> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch { expected: a.nrows, got: a.ncols });
    }
    let n = a.nrows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    let tiny = scale * 1e-14 * (n as f64);
    for k in 0..n {
        let mut piv = k;
        for r in k..n {
            if fabs(lu.get(r, k)) > fabs(lu.get(piv, k)) {
                piv = r;
            }
        }
        if fabs(lu.get(piv, k)) <= tiny {
            return Err(Error::SingularMatrix(format!(
                "{context}: zero pivot at column {k} of {n}"
            )));
        }
        if piv != k {
            for c in 0..n {
                let tmp = lu.get(k, c);
                *lu.get_mut(k, c) = lu.get(piv, c);
                *lu.get_mut(piv, c) = tmp;
            }
            perm.swap(k, piv);
        }
        let d = lu.get(k, k);
        for r in k + 1..n {
            let f = lu.get(r, k) / d;
            *lu.get_mut(r, k) = f;
            if f != 0.0 {
                for c in k + 1..n {
                    *lu.get_mut(r, c) -= f * lu.get(k, c);
                }
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.nrows;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        for i in 0..n {
            let mut acc = x[i];
            for k in 0..i {
                acc -= self.lu.get(i, k) * x[k];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in i + 1..n {
                acc -= self.lu.get(i, k) * x[k];
            }
            x[i] = acc / self.lu.get(i, i);
        }
        Ok(x)
    }
}

/// Eigenvalues of a symmetric matrix, ascending. Householder
/// tridiagonalization followed by implicit-shift QL.
pub fn symmetric_eigenvalues(a: &DMat) -> Result<Vec<f64>> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch { expected: a.nrows, got: a.ncols });
    }
    let n = a.nrows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(a);

    // implicit QL with Wilkinson shift (classic tqli, eigenvalues only)
    e.rotate_left(1); // e[i] becomes the subdiagonal coupling d[i] and d[i+1]
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fabs(d[m]) + fabs(d[m + 1]);
                if fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::SolverStagnated { residual: fabs(e[l]), tolerance: 0.0 });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + copysign(r, g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

fn copysign(a: f64, b: f64) -> f64 {
    libm::copysign(a, b)
}

/// Householder reduction to tridiagonal form; returns (diagonal, offdiagonal)
/// where `off[i]` couples rows i-1 and i.
fn tridiagonalize(a: &DMat) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows;
    let mut a = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        if l > 1 {
            let mut scale = 0.0;
            for k in 0..l {
                scale += fabs(a.get(i, k));
            }
            if scale == 0.0 {
                e[i] = a.get(i, l - 1);
            } else {
                for k in 0..l {
                    *a.get_mut(i, k) /= scale;
                    h += a.get(i, k) * a.get(i, k);
                }
                let mut f = a.get(i, l - 1);
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                *a.get_mut(i, l - 1) = f - g;
                f = 0.0;
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a.get(j, k) * a.get(i, k);
                    }
                    for k in j + 1..l {
                        g += a.get(k, j) * a.get(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * a.get(i, j);
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let f = a.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        *a.get_mut(j, k) -= f * e[k] + g * a.get(i, k);
                    }
                }
            }
        } else {
            e[i] = a.get(i, l - 1);
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a.get(i, i);
    }
    (d, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let mut a = DMat::zeros(3, 3);
        let vals = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        for r in 0..3 {
            for c in 0..3 {
                *a.get_mut(r, c) = vals[r][c];
            }
        }
        let lu = lu_factor(&a, "test").unwrap();
        let x = lu.solve(&[1.0, 2.0, 3.0]).unwrap();
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!(fabs(ri - bi) < 1e-12);
        }
    }

    #[test]
    fn lu_reports_singularity() {
        let mut a = DMat::zeros(2, 2);
        *a.get_mut(0, 0) = 1.0;
        *a.get_mut(0, 1) = 2.0;
        *a.get_mut(1, 0) = 2.0;
        *a.get_mut(1, 1) = 4.0;
        assert!(matches!(lu_factor(&a, "test"), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        // eigenvalues of tridiag(-1, 2, -1) of size n: 2 - 2 cos(k pi / (n+1))
        let n = 8;
        let mut a = DMat::zeros(n, n);
        for i in 0..n {
            *a.get_mut(i, i) = 2.0;
            if i + 1 < n {
                *a.get_mut(i, i + 1) = -1.0;
                *a.get_mut(i + 1, i) = -1.0;
            }
        }
        let ev = symmetric_eigenvalues(&a).unwrap();
        for (k, &lambda) in ev.iter().enumerate() {
            let expected =
                2.0 - 2.0 * libm::cos((k + 1) as f64 * core::f64::consts::PI / (n + 1) as f64);
            assert!(fabs(lambda - expected) < 1e-12, "{lambda} vs {expected}");
        }
    }

    #[test]
    fn rank_of_rank_deficient_matrix() {
        let mut a = DMat::zeros(3, 3);
        for c in 0..3 {
            *a.get_mut(0, c) = c as f64 + 1.0;
            *a.get_mut(1, c) = 2.0 * (c as f64 + 1.0);
            *a.get_mut(2, c) = if c == 0 { 1.0 } else { 0.0 };
        }
        assert_eq!(a.rank(1e-12), 2);
    }
}
