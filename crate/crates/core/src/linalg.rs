//! Small dense complex matrices and the Hermitian eigensolver.
//!
//! Everything here is sized for antenna arrays (n <= 16), so the algorithms
//! are the plain O(n^3) ones.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        CMat { rows, cols, data }
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Gram matrix `scale * A A^H` if `left`, else `scale * A^H A`.
    pub fn gram(&self, scale: f64, left: bool) -> CMat {
        let (n, inner) = if left { (self.rows, self.cols) } else { (self.cols, self.rows) };
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..inner {
                    acc += if left {
                        self[(i, k)] * self[(j, k)].conj()
                    } else {
                        self[(k, i)].conj() * self[(k, j)]
                    };
                }
                out[(i, j)] = acc * scale;
                out[(j, i)] = (acc * scale).conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cyclic Jacobi on a real symmetric `n x n` row-major matrix.
///
/// Returns the eigenvalues (unsorted, diagonal order) and the eigenvector
/// matrix `V` (row-major, eigenvectors in columns) with `A = V diag(w) V^T`.
pub(crate) fn symmetric_jacobi(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>()).max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off_sq: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let off = libm::sqrt(off_sq);
        if off <= JACOBI_TOL * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w = (0..n).map(|i| a[i * n + i]).collect();
    (w, v)
}

/// Real symmetric embedding `[[X, -Y], [Y, X]]` of a Hermitian `X + iY`.
fn real_embedding(m: &CMat) -> Vec<f64> {
    let n = m.rows;
    let n2 = 2 * n;
    let mut e = vec![0.0; n2 * n2];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            e[i * n2 + j] = z.re;
            e[(i + n) * n2 + (j + n)] = z.re;
            e[i * n2 + (j + n)] = -z.im;
            e[(i + n) * n2 + j] = z.im;
        }
    }
    e
}

/// Eigen-decomposition of a Hermitian matrix through its real embedding.
///
/// Every eigenvalue of the embedding appears twice, and any analytic function
/// of the embedding is again an embedding, so the complex result is read off
/// the `[X; Y]` blocks.
pub(crate) struct HermitianEigen {
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        let n = m.rows;
        let (values, vectors) = symmetric_jacobi(real_embedding(m), 2 * n);
        HermitianEigen { n, values, vectors }
    }

    /// Eigenvalues of the Hermitian matrix, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut w = self.values.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w.into_iter().step_by(2).collect()
    }

    /// `U f(diag) U^H` for a scalar function `f`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.n;
        let n2 = 2 * n;
        let fw: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        let entry = |i: usize, j: usize| -> f64 {
            (0..n2).map(|k| self.vectors[i * n2 + k] * fw[k] * self.vectors[j * n2 + k]).sum()
        };
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = Complex64::new(entry(i, j), entry(i + n, j));
            }
        }
        out
    }
}

/// `ln det(A)` for a Hermitian positive-definite matrix via Cholesky.
///
/// Returns `None` if a non-positive pivot is met.
pub(crate) fn ln_det_hpd(a: &CMat) -> Option<f64> {
    let n = a.rows;
    let mut l = CMat::zeros(n, n);
    let mut ln_det = 0.0;
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = Complex64::new(djj, 0.0);
        ln_det += 2.0 * libm::log(djj);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(ln_det)
}
