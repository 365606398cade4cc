use super::dense::{DenseMatrix, LuFactors};
use super::scalar::Scalar;
use super::sparse::{reverse_cuthill_mckee, SparseMatrix};
use crate::error::{Error, Result};

/// Banded LU with partial pivoting. Row `i` stores columns
/// `i - kl ..= i + ku + kl`; the extra `kl` columns hold pivoting fill.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(a: &SparseMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Invalid("LU of a non-square matrix".into()));
        }
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..n {
            for (j, _) in a.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        let width = 2 * kl + ku + 1;
        let mut lu = BandLu {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for (j, v) in a.row(i) {
                let p = lu.at(i, j);
                lu.data[p] = v;
            }
        }
        let tiny = f64::EPSILON * a.max_abs() * 1e-3;
        let reach = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular { pivot: k });
            }
            lu.pivots[k] = p;
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.data.swap(x, y);
                }
            }
            let pivot = lu.data[lu.at(k, k)];
            let krow = lu.at(k, k);
            for i in k + 1..=last_row {
                let ik = lu.at(i, k);
                let l = lu.data[ik] / pivot;
                lu.data[ik] = l;
                if l == T::zero() {
                    continue;
                }
                let len = last_col - k;
                // row k and row i are contiguous over columns k+1..=last_col
                let (src, dst) = (krow + 1, ik + 1);
                for t in 0..len {
                    let u = lu.data[src + t];
                    lu.data[dst + t] -= l * u;
                }
            }
        }
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bands(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    /// Moduli of the diagonal of U.
    pub fn pivot_moduli(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[self.at(i, i)].abs())
            .collect()
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        let n = self.n;
        let reach = self.kl + self.ku;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == T::zero() {
                continue;
            }
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.data[self.at(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            let base = self.at(k, k);
            for j in k + 1..=(k + reach).min(n - 1) {
                acc -= self.data[base + (j - k)] * x[j];
            }
            x[k] = acc / self.data[base];
        }
    }
}

enum Kernel<T> {
    Dense(LuFactors<T>),
    Band(BandLu<T>),
}

/// Factorization of a sparse matrix. Small systems are densified; larger
/// ones use the banded kernel under whichever of the natural and
/// reverse Cuthill-McKee orderings has the smaller bandwidth.
pub struct SparseLu<T> {
    n: usize,
    original: SparseMatrix<T>,
    perm: Option<Vec<usize>>,
    kernel: Kernel<T>,
}

const DENSE_CUTOFF: usize = 200;

impl<T: Scalar> SparseLu<T> {
    pub fn factor(a: &SparseMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Invalid("LU of a non-square matrix".into()));
        }
        if n <= DENSE_CUTOFF {
            let dense: DenseMatrix<T> = a.to_dense();
            return Ok(SparseLu {
                n,
                original: a.clone(),
                perm: None,
                kernel: Kernel::Dense(LuFactors::factor(&dense)?),
            });
        }
        let natural = a.bandwidth();
        let rcm = reverse_cuthill_mckee(a);
        let permuted = a.permute_symmetric(&rcm);
        let (perm, kernel) = if permuted.bandwidth() < natural {
            let lu = BandLu::factor(&permuted).map_err(|e| match e {
                Error::Singular { pivot } => Error::Singular { pivot: rcm[pivot] },
                other => other,
            })?;
            (Some(rcm), Kernel::Band(lu))
        } else {
            (None, Kernel::Band(BandLu::factor(a)?))
        };
        Ok(SparseLu {
            n,
            original: a.clone(),
            perm,
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `min |u_ii| / max |u_ii|`; tiny values flag near singularity.
    pub fn pivot_ratio(&self) -> f64 {
        let p = match &self.kernel {
            Kernel::Dense(lu) => {
                let u = lu.packed();
                (0..self.n).map(|i| u[(i, i)].abs()).collect()
            }
            Kernel::Band(lu) => lu.pivot_moduli(),
        };
        let max = p.iter().copied().fold(0.0, f64::max);
        let min = p.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    fn solve_raw(&self, b: &[T]) -> Vec<T> {
        match &self.kernel {
            // the dense kernel refines against its own copy
            Kernel::Dense(lu) => lu.solve(b),
            Kernel::Band(lu) => match &self.perm {
                None => {
                    let mut x = b.to_vec();
                    lu.solve_in_place(&mut x);
                    x
                }
                Some(perm) => {
                    let mut y: Vec<T> = perm.iter().map(|&old| b[old]).collect();
                    lu.solve_in_place(&mut y);
                    let mut x = vec![T::zero(); self.n];
                    for (new, &old) in perm.iter().enumerate() {
                        x[old] = y[new];
                    }
                    x
                }
            },
        }
    }

    /// Solves `A x = b` with one step of iterative refinement.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let mut x = self.solve_raw(b);
        if let Kernel::Dense(_) = self.kernel {
            return x;
        }
        let ax = self.original.mul_vec(&x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let dx = self.solve_raw(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        x
    }
}
