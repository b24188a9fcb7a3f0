use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{c, cr, Real, C};

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The `k`-th eigenvector.
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.eigenvectors.column(k)
    }

    /// `V f(Λ) V^H`.
    pub fn apply_fn(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = self.dim();
        let fl: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        // (V F)^H computed row-wise, then V (F V^H)
        let fvh = ComplexMatrix::from_fn(n, n, |i, j| fl[i] * v[(j, i)].conj());
        v.matmul(&fvh)
    }

    /// `V Λ V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply_fn(cr)
    }
}

/// Hermitian tolerance used for eigensolver and propagator preconditions.
fn hermitian_tolerance<T: Real>(m: &ComplexMatrix<T>) -> T {
    T::tol(1e-9) * m.norm_inf().max(T::one())
}

fn check_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dev = m.hermitian_deviation();
    let tol = hermitian_tolerance(m);
    if dev > tol {
        return Err(Error::NonHermitian {
            deviation: dev.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to a Hermitian tridiagonal matrix, a diagonal phase
/// transform to make it real symmetric, then implicit QL with Wilkinson-style
/// shifts. Eigenvalues come back ascending. Within a degenerate cluster
/// (gap below 1e-10) the vectors are re-orthonormalized in index order, and
/// every vector is phased so that its largest-magnitude component (first one
/// on ties) is real and positive.
pub fn eig_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    check_hermitian(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    // Work on the exactly Hermitian part.
    let half = T::lit(0.5);
    let mut a: ComplexMatrix<T> = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);
    let mut q: ComplexMatrix<T> = ComplexMatrix::identity(n);
    let mut offdiag = vec![C::<T>::zero(); n];

    for k in 0..n.saturating_sub(1) {
        let x: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail_norm2: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail_norm2 == T::zero() {
            offdiag[k] = x[0];
            continue;
        }
        let alpha = (x[0].norm_sqr() + tail_norm2).sqrt();
        let x0_abs = x[0].norm();
        let phase = if x0_abs == T::zero() { C::one() } else { x[0] / x0_abs };
        let mut v = x;
        v[0] = v[0] + phase * alpha;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = T::lit(2.0) / vnorm2;
        let len = v.len();
        let off = k + 1;

        // p = tau * A22 v ; w = p - (tau/2)(v^H p) v ; A22 -= v w^H + w v^H
        let p: Vec<C<T>> = (0..len)
            .map(|i| {
                let mut s: C<T> = C::zero();
                for j in 0..len {
                    s = s + a[(off + i, off + j)] * v[j];
                }
                s * tau
            })
            .collect();
        let vhp = v
            .iter()
            .zip(&p)
            .fold(C::<T>::zero(), |acc, (&vi, &pi)| acc + vi.conj() * pi);
        let kk = vhp * (tau * half);
        let w: Vec<C<T>> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kk * vi).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(off + i, off + j)] = a[(off + i, off + j)] - upd;
            }
        }
        let e = -phase * alpha;
        offdiag[k] = e;
        for i in off..n {
            a[(i, k)] = C::zero();
            a[(k, i)] = C::zero();
        }
        a[(off, k)] = e;
        a[(k, off)] = e.conj();

        // Q <- Q H, H = I - tau v v^H acting on columns off..n
        for r in 0..n {
            let mut s: C<T> = C::zero();
            for j in 0..len {
                s = s + q[(r, off + j)] * v[j];
            }
            let s = s * tau;
            for j in 0..len {
                q[(r, off + j)] = q[(r, off + j)] - s * v[j].conj();
            }
        }
    }

    // Phase transform: T_real = P^H T P with real non-negative subdiagonal.
    let mut phases = vec![C::<T>::one(); n];
    let mut sub = vec![T::zero(); n];
    for k in 0..n - 1 {
        let e = offdiag[k];
        let ae = e.norm();
        sub[k] = ae;
        phases[k + 1] = if ae == T::zero() {
            phases[k]
        } else {
            phases[k] * (e / ae)
        };
    }
    let mut diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();

    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tql2(&mut diag, &mut sub, &mut z, n)?;

    // eigenvectors = Q P Z
    let qp = ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
    let mut vecs: ComplexMatrix<T> = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let s = qp[(i, k)];
            if s.is_zero() {
                continue;
            }
            for j in 0..n {
                vecs[(i, j)] = vecs[(i, j)] + s * z[k * n + j];
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        diag[i]
            .partial_cmp(&diag[j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let mut columns: Vec<Vec<C<T>>> = order.iter().map(|&i| vecs.column(i)).collect();

    fix_degenerate_clusters(&eigenvalues, &mut columns);
    for col in columns.iter_mut() {
        fix_phase(col);
    }

    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| columns[j][i]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Modified Gram-Schmidt inside each cluster of eigenvalues closer than 1e-10.
fn fix_degenerate_clusters<T: Real>(values: &[T], columns: &mut [Vec<C<T>>]) {
    let gap = T::tol(1e-10);
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            for k in start..end {
                for prev in start..k {
                    let (head, tail) = columns.split_at_mut(k);
                    let u = &head[prev];
                    let v = &mut tail[0];
                    let proj = super::inner(u, v);
                    for (vi, &ui) in v.iter_mut().zip(u) {
                        *vi = *vi - proj * ui;
                    }
                }
                let norm = super::vec_norm(&columns[k]);
                for vi in columns[k].iter_mut() {
                    *vi = *vi / norm;
                }
            }
        }
        start = end;
    }
}

/// Rotates `v` so that its largest-magnitude component is real positive.
pub(crate) fn fix_phase<T: Real>(v: &mut [C<T>]) {
    let max = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return;
    }
    let cutoff = max * (T::one() - T::tol(1e-8));
    let pivot = v.iter().find(|z| z.norm() >= cutoff).copied().unwrap_or(C::one());
    let rot = pivot.conj() / cr(pivot.norm());
    for z in v.iter_mut() {
        *z = *z * rot;
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e` with `e[i]` coupling `i` and `i+1`), accumulating the
/// rotations into the row-major `z`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T], n: usize) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_iter = 60 * n;
    let mut iters = 0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iters += 1;
                if iters > max_iter {
                    return Err(Error::NoConvergence(max_iter));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut cc = T::one();
                let mut c2 = cc;
                let mut c3 = cc;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = cc;
                    s2 = s;
                    let g = cc * e[i];
                    h = cc * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    cc = p / r;
                    p = cc * d[i] - s * g;
                    d[i + 1] = h + s * (cc * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + cc * zk1;
                        z[k * n + i] = cc * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = cc * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

/// `U = exp(-i H t)` through the eigendecomposition of `H`.
pub fn expm_hermitian_propagator<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    let eig = eig_hermitian(h)?;
    Ok(eig.apply_fn(|l| {
        let (s, co) = (l * t).sin_cos();
        c(co, -s)
    }))
}
