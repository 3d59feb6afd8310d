//! Dense inversion with a conditioning guard, and a symmetric banded
//! Cholesky solver that reports zero-energy modes.

#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest accepted 1-norm condition estimate for small dense inverses.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Inverts a small dense matrix by partially pivoted LU, refusing results
/// whose 1-norm condition number exceeds [`CONDITION_LIMIT`].
///
/// Matrices with a positive diagonal are first equilibrated symmetrically,
/// `A = S Â S` with `S = diag(√a_ii)`, so the guard measures the conditioning
/// of `Â` rather than the spread of physical units.
pub fn guarded_inverse(m: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let scale: Vec<f64> = if (0..n).all(|i| m[(i, i)] > 0.0) {
        (0..n).map(|i| m[(i, i)].sqrt()).collect()
    } else {
        vec![1.0; n]
    };
    let equilibrated = DMatrix::from_fn(n, n, |i, j| m[(i, j)] / (scale[i] * scale[j]));
    let fail = |condition: f64| Error::IllConditioned {
        name: name.to_string(),
        condition,
    };
    let inv = equilibrated.clone().lu().try_inverse().ok_or_else(|| fail(f64::INFINITY))?;
    let condition = norm1(&equilibrated) * norm1(&inv);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(fail(condition));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| inv[(i, j)] / (scale[i] * scale[j])))
}

pub fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest |a_ij - a_ji| relative to the largest |a_ij|.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / scale
}

/// Symmetric matrix stored as its lower band, row by row.
///
/// Entry `(i, j)` with `i - bw <= j <= i` lives at `i * (bw + 1) + (j + bw - i)`.
#[derive(Debug, Clone)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

/// Outcome of a failed factorization: the pivot that vanished and the
/// corresponding null vector of the leading block.
#[derive(Debug, Clone)]
pub struct ZeroPivot {
    pub index: usize,
    pub null_vector: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)` (and implicitly `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside half-bandwidth {}", self.bw);
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    /// Replaces row and column `k` by the identity row, as for a homogeneous
    /// Dirichlet condition.
    pub fn constrain(&mut self, k: usize) {
        let lo = k.saturating_sub(self.bw);
        let hi = (k + self.bw).min(self.n - 1);
        for j in lo..=hi {
            if j != k {
                self.set(k, j, 0.0);
            }
        }
        self.set(k, k, 1.0);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            let off = lo + self.bw - i;
            let mut acc = row[self.bw] * x[i];
            for (j, &a) in (lo..i).zip(&row[off..self.bw]) {
                acc += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += acc;
        }
        y
    }

    /// `b - A x` accumulated with error-free products and sums.
    pub fn compensated_residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                let (mut s, mut c) = (b[i], 0.0);
                for j in lo..=hi {
                    let (a, v) = (-self.get(i, j), x[j]);
                    let p = a * v;
                    let e = a.mul_add(v, -p);
                    let t = s + p;
                    let z = t - s;
                    c += (s - (t - z)) + (p - z) + e;
                    s = t;
                }
                s + c
            })
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[self.slot(i, i)]).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// In-place Cholesky factorization `A = L Lᵀ`.
    ///
    /// A pivot at or below `rel_tol` times its original diagonal is treated
    /// as a zero-energy mode; the returned null vector `v` satisfies `A v ≈ 0`.
    pub fn cholesky(mut self, rel_tol: f64) -> std::result::Result<BandCholesky, ZeroPivot> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let a_ii = self.data[i * w + bw];
            for j in lo..i {
                let jlo = j.saturating_sub(bw).max(lo);
                let (head, tail) = self.data.split_at_mut(i * w);
                let row_j = &head[j * w + (jlo + bw - j)..j * w + bw];
                let row_i = &mut tail[..w];
                let dot: f64 = row_i[jlo + bw - i..j + bw - i].iter().zip(row_j).map(|(a, b)| a * b).sum();
                row_i[j + bw - i] = (row_i[j + bw - i] - dot) / head[j * w + bw];
            }
            let mut d = a_ii;
            for k in lo..i {
                let l = self.data[i * w + (k + bw - i)];
                d -= l * l;
            }
            if d.is_nan() || d <= rel_tol * a_ii.abs() || a_ii <= 0.0 {
                return Err(ZeroPivot {
                    index: i,
                    null_vector: self.null_vector_at(i),
                });
            }
            self.data[i * w + bw] = d.sqrt();
        }
        Ok(BandCholesky { factor: self })
    }

    fn null_vector_at(&self, k: usize) -> Vec<f64> {
        let (bw, w) = (self.bw, self.bw + 1);
        let mut v = vec![0.0; self.n];
        v[k] = 1.0;
        let lo = k.saturating_sub(bw);
        for i in (0..k).rev() {
            let mut s = if i >= lo { -self.data[k * w + (i + bw - k)] } else { 0.0 };
            for j in (i + 1)..k.min(i + bw + 1) {
                s -= self.data[j * w + (i + bw - j)] * v[j];
            }
            v[i] = s / self.data[i * w + bw];
        }
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        v.iter_mut().for_each(|x| *x /= scale);
        v
    }
}

/// Lower-triangular band factor produced by [`BandedSym::cholesky`].
#[derive(Debug, Clone)]
pub struct BandCholesky {
    factor: BandedSym,
}

impl BandCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let f = &self.factor;
        let (n, bw, w) = (f.n, f.bw, f.bw + 1);
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for j in lo..i {
                s -= f.data[i * w + (j + bw - i)] * x[j];
            }
            x[i] = s / f.data[i * w + bw];
        }
        for i in (0..n).rev() {
            let s = x[i] / f.data[i * w + bw];
            x[i] = s;
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                x[j] -= f.data[i * w + (j + bw - i)] * s;
            }
        }
        x
    }
}

impl BandCholesky {
    /// Solve followed by up to `steps` rounds of iterative refinement
    /// against `a`; a round is kept only while it shrinks the residual.
    pub fn solve_refined(&self, a: &BandedSym, rhs: &[f64], steps: usize) -> Vec<f64> {
        let mut x = self.solve(rhs);
        let mut r = a.compensated_residual(&x, rhs);
        for _ in 0..steps {
            let dx = self.solve(&r);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(p, q)| p + q).collect();
            let next = a.compensated_residual(&trial, rhs);
            if dot(&next, &next) >= dot(&r, &r) {
                break;
            }
            x = trial;
            r = next;
        }
        x
    }
}

/// Diagonally preconditioned conjugate gradients on a banded matrix.
pub fn pcg(a: &BandedSym, rhs: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let rhs_norm = dot(rhs, rhs).sqrt();
    let mut x = vec![0.0; n];
    if rhs_norm == 0.0 {
        return Ok(x);
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.matvec(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = dot(&r, &r).sqrt() / rhs_norm;
        if res < tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r = residual_norm(a, &x, rhs);
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: r,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ‖A x − b‖ / ‖b‖.
/// Normwise backward error `‖b − A x‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`.
pub fn backward_error(a: &BandedSym, x: &[f64], b: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let r = a.compensated_residual(x, b);
    let den = a.norm_inf() * inf(x) + inf(b);
    if den == 0.0 {
        0.0
    } else {
        inf(&r) / den
    }
}

pub fn residual_norm(a: &BandedSym, x: &[f64], b: &[f64]) -> f64 {
    let r = a.compensated_residual(x, b);
    let num = dot(&r, &r);
    let den = dot(b, b);
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
