use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DenseMatrix<f64>,
}

fn check_symmetric(a: &DenseMatrix<f64>, tol: f64) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Invalid("non-square matrix".into()));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i + 1..n {
            let d = (a[(i, j)] - a[(j, i)]).abs();
            if d > tol * scale {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    defect: d,
                });
            }
        }
    }
    Ok(())
}

/// Householder tridiagonalization followed by implicit QL.
pub fn sym_eig_dense(a: &DenseMatrix<f64>) -> Result<SymEig> {
    check_symmetric(a, 1e-12)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SymEig {
            values: vec![],
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    // work on the exactly symmetrized copy
    let mut v = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    let mut vt = v.transpose();
    tql2(&mut vt, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| vt[(order[j], i)]);
    Ok(SymEig { values, vectors })
}

/// Generalized problem `A x = λ M x` with `M` symmetric positive definite.
/// Eigenvectors come out `M`-orthonormal.
pub fn sym_eig_generalized(a: &DenseMatrix<f64>, m: &DenseMatrix<f64>) -> Result<SymEig> {
    check_symmetric(a, 1e-12)?;
    check_symmetric(m, 1e-12)?;
    let n = a.nrows();
    if m.nrows() != n {
        return Err(Error::Invalid("pencil dimension mismatch".into()));
    }
    let l = cholesky(m)?;
    // W = L⁻¹ A, then C = L⁻¹ Wᵀ
    let w = forward_rows(&l, a);
    let c = forward_rows(&l, &w.transpose());
    let c = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = sym_eig_dense(&c)?;
    // X = L⁻ᵀ Q
    let mut x = eig.vectors.clone();
    for i in (0..n).rev() {
        for j in i + 1..n {
            let lji = l[(j, i)];
            if lji == 0.0 {
                continue;
            }
            let (head, tail) = x.row_pair_mut(i, j);
            for (a, b) in head.iter_mut().zip(tail) {
                *a -= lji * b;
            }
        }
        let lii = l[(i, i)];
        for v in x.row_mut(i) {
            *v /= lii;
        }
    }
    Ok(SymEig {
        values: eig.values,
        vectors: x,
    })
}

/// Lower Cholesky factor.
pub fn cholesky(m: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    let n = m.nrows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut s = m[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        if !(s > 0.0) {
            return Err(Error::Singular { pivot: j });
        }
        let ljj = s.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            let (ri, rj) = (l.row(i), l.row(j));
            for k in 0..j {
                s -= ri[k] * rj[k];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L X = B` row by row.
fn forward_rows(l: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for i in 0..n {
        for j in 0..i {
            let lij = l[(i, j)];
            if lij == 0.0 {
                continue;
            }
            let (head, tail) = x.row_pair_mut(i, j);
            for (a, b) in head.iter_mut().zip(tail) {
                *a -= lij * b;
            }
        }
        let lii = l[(i, i)];
        for v in x.row_mut(i) {
            *v /= lii;
        }
    }
    x
}

fn tred2(v: &mut DenseMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal (d, e). `vt` holds eigenvectors as rows.
fn tql2(vt: &mut DenseMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    let mut sweeps = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > 50 * n.max(1) {
                    return Err(Error::NoConvergence {
                        iterations: sweeps,
                        best_residuals: vec![e[l].abs()],
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = rows_pair(vt, i);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn rows_pair(m: &mut DenseMatrix<f64>, i: usize) -> (&mut [f64], &mut [f64]) {
    let n = m.ncols();
    let start = i * n;
    m.data_mut()[start..start + 2 * n].split_at_mut(n)
}
