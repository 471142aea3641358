//! Cyclic Jacobi methods for small dense complex matrices.
//!
//! Both routines use the same two-sided complex Jacobi rotation. For the
//! Hermitian eigenproblem it is applied to rows and columns of `A`. For the
//! SVD it is applied one-sided to the columns (Hestenes), which resolves
//! tiny singular values to about `eps * ||A||`.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn vector(&self, k: usize) -> CVector<T> {
        self.vectors.column(k)
    }

    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }

    /// Rebuilds the matrix with `f` applied to each eigenvalue.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * f(self.values[j]));
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Rotation `G` on the `(p, q)` plane that diagonalises the 2x2 Hermitian
/// block `[[alpha, b], [b*, beta]]` via `G^dagger H G`.
///
/// Returned as `(c, s, phase)` with
/// `G = [[c, s], [-s * conj(phase), c * conj(phase)]]` and `phase = b / |b|`.
#[inline]
fn jacobi_rotation<T: Real>(alpha: T, beta: T, b: Complex<T>) -> (T, T, Complex<T>) {
    let abs_b = b.norm();
    let phase = b / abs_b;
    let tau = (beta - alpha) / (T::two() * abs_b);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, t * c, phase)
}

/// `M <- M G` restricted to columns `p`, `q`.
#[inline]
fn rotate_columns<T: Real>(m: &mut CMatrix<T>, p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
    let pc = phase.conj();
    for i in 0..m.rows() {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * c - mq * pc * s;
        m[(i, q)] = mp * s + mq * pc * c;
    }
}

/// `M <- G^dagger M` restricted to rows `p`, `q`.
#[inline]
fn rotate_rows<T: Real>(m: &mut CMatrix<T>, p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
    for j in 0..m.cols() {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = mp * c - mq * phase * s;
        m[(q, j)] = mp * s + mq * phase * c;
    }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
///
/// Fails on non-square input or when `A` deviates from Hermiticity by more
/// than `tol` (entrywise). The matrix is symmetrised before iterating.
pub fn hermitian_eig<T: Real>(a: &CMatrix<T>, tol: T) -> Result<EigenDecomposition<T>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("eigendecomposition of a {}x{} matrix", a.rows(), a.cols())));
    }
    let deviation = a.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation: deviation.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    let n = a.rows();
    let mut work = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * T::half());
    for i in 0..n {
        work[(i, i)].im = T::zero();
    }
    let mut vectors = CMatrix::identity(n);
    let scale = work.frobenius_norm();
    let threshold = T::epsilon() * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&work) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = work[(p, q)];
                if b.norm() <= T::min_positive_value() {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(work[(p, p)].re, work[(q, q)].re, b);
                rotate_columns(&mut work, p, q, c, s, phase);
                rotate_rows(&mut work, p, q, c, s, phase);
                rotate_columns(&mut vectors, p, q, c, s, phase);
                work[(p, q)] = Complex::zero();
                work[(q, p)] = Complex::zero();
                work[(p, p)].im = T::zero();
                work[(q, q)].im = T::zero();
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].re.partial_cmp(&work[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| work[(k, k)].re).collect();
    let sorted = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(EigenDecomposition { values, vectors: sorted })
}

/// Singular values (descending) and right singular vectors (columns of `V`).
#[derive(Debug, Clone)]
pub struct RightSvd<T: Real> {
    pub singular_values: Vec<T>,
    pub right_vectors: CMatrix<T>,
}

/// One-sided Jacobi SVD returning singular values and right singular vectors.
pub fn right_svd<T: Real>(a: &CMatrix<T>) -> RightSvd<T> {
    let n = a.cols();
    let mut work = a.clone();
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Complex::zero());
                for i in 0..work.rows() {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut work, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n)
        .map(|j| (0..work.rows()).map(|i| work[(i, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    RightSvd {
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        right_vectors: CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

/// Orthonormal basis of `{v : ||A v|| <= tol * ||A||}` where `||A||` is the
/// spectral norm. Empty when the kernel is trivial.
pub fn null_space<T: Real>(a: &CMatrix<T>, tol: T) -> Result<Vec<CVector<T>>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("null space of a {}x{} matrix", a.rows(), a.cols())));
    }
    let svd = right_svd(a);
    let norm = svd.singular_values.first().copied().unwrap_or_else(T::zero);
    let cutoff = tol * norm;
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(k, _)| svd.right_vectors.column(k))
        .collect())
}
