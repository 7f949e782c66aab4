//! Linear solvers: Thomas algorithm, banded LU with partial pivoting and
//! a Jacobi-preconditioned BiCGSTAB.

use crate::error::{Error, Result};

/// Solves a tridiagonal system. `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Singular(0));
    }
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 {
            return Err(Error::Singular(i));
        }
        c[i] = if i + 1 < n { upper[i] / beta } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Band matrix in LAPACK `gbtrf` layout: column-major with `kl` extra rows
/// reserved for pivoting fill-in. Entry `(i, j)` lives in row
/// `kl + ku + i - j` of column `j`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    /// Adds `val` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, val: f64) {
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += val;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku < j || j + self.kl < i {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    /// LU factorisation with partial pivoting, consuming the matrix.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let a = &mut self.data;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab;
            let mut jp = 0;
            let mut best = a[col + kv].abs();
            for t in 1..=km {
                let v = a[col + kv + t].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 {
                return Err(Error::Singular(j));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let base = c * ldab + kv;
                    a.swap(base + j - c, base + j + jp - c);
                }
            }
            let pivot = a[col + kv];
            for t in 1..=km {
                a[col + kv + t] /= pivot;
            }
            for c in j + 1..=ju {
                let base = c * ldab + kv;
                let ajc = a[base + j - c];
                if ajc != 0.0 {
                    for t in 1..=km {
                        let l = a[col + kv + t];
                        a[base + j + t - c] -= l * ajc;
                    }
                }
            }
        }
        Ok(BandLu { band: self, ipiv })
    }
}

/// Factored band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    band: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let BandMatrix {
            n, kl, ku, ldab, ..
        } = self.band;
        let kv = kl + ku;
        let a = &self.band.data;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                for t in 1..=km {
                    b[j + t] -= a[j * ldab + kv + t] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= a[j * ldab + kv];
            let bj = b[j];
            if bj != 0.0 {
                for r in j.saturating_sub(kv)..j {
                    b[r] -= a[j * ldab + kv + r - j] * bj;
                }
            }
        }
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned BiCGSTAB for a nonsymmetric operator given as a
/// closure. Returns the solution and the number of iterations used.
pub fn bicgstab(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    diag: &[f64],
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map(|x| x.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let precond = |y: &[f64]| -> Vec<f64> { y.iter().zip(diag).map(|(y, d)| y / d).collect() };
    let mut rel = norm2(&r) / bnorm;
    for it in 0..max_iter {
        if rel <= tol {
            return Ok((x, it));
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        v = apply(&p_hat);
        alpha = rho / dot(&r_hat, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if norm2(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok((x, it + 1));
        }
        let s_hat = precond(&s);
        let t = apply(&s_hat);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm2(&r) / bnorm;
        if omega == 0.0 {
            break;
        }
    }
    if rel <= tol {
        return Ok((x, max_iter));
    }
    Err(Error::LinearSolve {
        residual: rel,
        iterations: max_iter,
    })
}
