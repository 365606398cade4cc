use crate::error::{Error, Result};
use crate::fem::AssembledForms;
use crate::linalg::{sym_eig_dense, sym_eig_generalized, DenseMatrix};

pub const K0_DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone)]
pub struct K0Spectrum {
    /// Nonzero eigenvalues, descending.
    pub rho: Vec<f64>,
    /// Every eigenvalue of the symmetrized operator, ascending.
    pub all: Vec<f64>,
    pub kernel_dim: usize,
    /// Eigenvalues at or below this are counted as kernel.
    pub threshold: f64,
    pub matrix: DenseMatrix<f64>,
}

impl K0Spectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.all[0]
    }
}

/// Dense `K₀ʰ = S G S` in the Neumann eigenbasis `A χ = μ M χ` with the
/// constant mode removed, `S = diag(μ^{-1/2})` and
/// `G = Xᵀ (M_D − m_D m_Dᵀ/|D|) X`, `m_D = M_D 1`. The rank-one term
/// measures the product against `1_D` modulo constants, so `1/ρ` runs
/// over the nonzero eigenvalues of `(A, M_D)` exactly.
pub fn discrete_k0(forms: &AssembledForms) -> Result<K0Spectrum> {
    let n = forms.dim();
    if n > K0_DENSE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: K0_DENSE_LIMIT,
        });
    }
    let basis = sym_eig_generalized(&forms.a.to_dense(), &forms.m.to_dense())?;
    let scale = basis.values[n - 1];
    if basis.values[1] <= 1e-10 * scale {
        return Err(Error::Invalid(
            "stiffness kernel is not one-dimensional (disconnected mesh?)".into(),
        ));
    }
    let x = &basis.vectors;
    let one = vec![1.0; n];
    let m_d1 = forms.m_d.mul_vec(&one);
    let area_d: f64 = m_d1.iter().sum();
    // Columns 1..n of X, scaled by μ^{-1/2}.
    let k = n - 1;
    let xs = DenseMatrix::from_fn(n, k, |i, j| x[(i, j + 1)] / basis.values[j + 1].sqrt());
    let mut mdx = DenseMatrix::<f64>::zeros(n, k);
    for j in 0..k {
        let col = forms.m_d.mul_vec(&xs.column(j));
        mdx.set_column(j, &col);
    }
    let proj: Vec<f64> = (0..k)
        .map(|j| (0..n).map(|i| m_d1[i] * xs[(i, j)]).sum())
        .collect();
    let xt = xs.transpose();
    let mut g = xt.matmul(&mdx);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] -= proj[i] * proj[j] / area_d;
        }
    }
    for i in 0..k {
        for j in 0..i {
            let s = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    let eig = sym_eig_dense(&g)?;
    let top = eig.values[k - 1].abs().max(f64::MIN_POSITIVE);
    let threshold = 1e-9 * top;
    let mut rho: Vec<f64> = eig
        .values
        .iter()
        .copied()
        .filter(|&r| r > threshold)
        .collect();
    rho.reverse();
    let kernel_dim = k - rho.len();
    Ok(K0Spectrum {
        rho,
        all: eig.values,
        kernel_dim,
        threshold,
        matrix: g,
    })
}
