use num_complex::Complex64;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

type C = Complex64;

/// Eigenvalues and unit eigenvectors of a small complex upper Hessenberg
/// matrix by shifted QR to Schur form and triangular back substitution.
pub fn hessenberg_eig(h: &DenseMatrix<C>) -> Result<(Vec<C>, DenseMatrix<C>)> {
    let m = h.nrows();
    let mut t = h.clone();
    let mut q = DenseMatrix::<C>::identity(m);
    if m == 0 {
        return Ok((vec![], q));
    }
    let eps = f64::EPSILON;
    let mut hi = m - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let zero = C::new(0.0, 0.0);
    let mut rots: Vec<(f64, C)> = Vec::with_capacity(m);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            if t[(l, l - 1)].norm() <= eps * scale.max(f64::MIN_POSITIVE) {
                t[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * m {
            return Err(Error::NoConvergence {
                iterations: total,
                best_residuals: vec![t[(hi, hi - 1)].norm()],
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            t[(hi, hi)] + C::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };
        for k in l..=hi {
            t[(k, k)] -= mu;
        }
        rots.clear();
        for k in l..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..m {
                let (x, y) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = l + off;
            let last = (k + 2).min(hi);
            for i in 0..=last {
                let (x, y) = (t[(i, k)], t[(i, k + 1)]);
                t[(i, k)] = x * c + y * s.conj();
                t[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..m {
                let (x, y) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            t[(k, k)] += mu;
        }
    }

    let values: Vec<C> = (0..m).map(|i| t[(i, i)]).collect();
    let tnorm = t.data().iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let small = eps * tnorm.max(f64::MIN_POSITIVE);
    let mut vecs = DenseMatrix::<C>::zeros(m, m);
    let mut y = vec![zero; m];
    for i in 0..m {
        for v in y.iter_mut() {
            *v = zero;
        }
        y[i] = C::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = zero;
            for l in j + 1..=i {
                acc += t[(j, l)] * y[l];
            }
            let mut den = t[(j, j)] - values[i];
            if den.norm() < small {
                den = C::new(small, 0.0);
            }
            y[j] = -acc / den;
        }
        let x = q.mul_vec(&y);
        let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for (r, v) in x.iter().enumerate() {
            vecs[(r, i)] = v / nrm;
        }
    }
    Ok((values, vecs))
}

fn wilkinson(a: C, b: C, c: C, d: C) -> C {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Rotation `[[c, s], [-s̄, c]]` mapping (a, b) to (r, 0).
fn givens(a: C, b: C) -> (f64, C) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, (b / nb).conj());
    }
    let r = na.hypot(nb);
    let phase = a / na;
    (na / r, phase * b.conj() / r)
}

/// Unitary reduction `A = Q H Qᴴ` to upper Hessenberg form by Householder
/// reflections.
pub fn hessenberg_reduce(a: &DenseMatrix<C>) -> (DenseMatrix<C>, DenseMatrix<C>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DenseMatrix::<C>::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v: Vec<C> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vn;
        }
        // H ← (I − 2vvᴴ) H (I − 2vvᴴ)
        for j in 0..n {
            let s: C = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= 2.0 * v[i - k - 1] * s;
            }
        }
        for i in 0..n {
            let s: C = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(i, j)] -= 2.0 * s * v[j - k - 1].conj();
            }
            let s: C = (k + 1..n).map(|j| q[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                q[(i, j)] -= 2.0 * s * v[j - k - 1].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvalues and unit eigenvectors of a general complex matrix.
pub fn general_eig(a: &DenseMatrix<C>) -> Result<(Vec<C>, DenseMatrix<C>)> {
    let (h, q) = hessenberg_reduce(a);
    let (values, y) = hessenberg_eig(&h)?;
    Ok((values, q.matmul(&y)))
}
