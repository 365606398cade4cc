//! Spectra of the pencils `(A, M_D + δ M_S)`: the limit problem, complex
//! contrasts, the dense K₀ operator and branch continuation.

mod k0;
mod track;

pub use k0::{discrete_k0, K0Spectrum, K0_DENSE_LIMIT};
pub use track::{
    circle_path, cluster_track, track_branch, BranchStep, ClusterStep, ClusterTrack, TrackOptions,
    TrackedBranch,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{AssembledForms, CoefficientField};
use crate::linalg::{
    fix_sign, norm2, shift_invert_arnoldi, ArnoldiOptions, ArnoldiStats, ShiftInvertOperator,
    SparseLu, SparseMatrix,
};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: C,
    /// Normalized so that `vᵀ B_δ v = 1`.
    pub vector: Vec<C>,
    /// `‖A v − λ B_δ v‖ / ‖v‖`
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub delta: C,
    pub sigma: C,
    pub pairs: Vec<EigenPair>,
    pub stats: ArnoldiStats,
    pub warnings: Vec<String>,
}

/// Eigenvalues closer than this relative spread form one cluster.
pub const CLUSTER_SPREAD: f64 = 1e-6;

/// `|D| / |Ω∖D̄|`
pub fn validity_radius(forms: &AssembledForms) -> f64 {
    forms.inclusion_area / forms.shell_area
}

/// Pivot spread of `A − σB` below which σ counts as an eigenvalue.
const COLLISION_PIVOT_RATIO: f64 = 1e-6;

enum Factor {
    Real(SparseLu<f64>),
    Complex(SparseLu<C>),
}

/// Shift-invert operator of `(A, B_δ)` restricted to the `B_δ`-bilinear
/// complement of the constant vector.
pub struct PencilOperator<'a> {
    a: &'a SparseMatrix<f64>,
    b: SparseMatrix<C>,
    sigma: C,
    factor: Factor,
    b_one: Vec<C>,
    one_b_one: C,
}

impl<'a> PencilOperator<'a> {
    pub fn new(forms: &'a AssembledForms, delta: C, sigma: C) -> Result<Self> {
        let b = forms.weighted_mass(CoefficientField::contrast(delta));
        let factor = if delta.im == 0.0 && sigma.im == 0.0 {
            let br = forms.m_d.lin_comb(1.0, &forms.m_s, delta.re)?;
            Factor::Real(SparseLu::factor(&forms.a.lin_comb(1.0, &br, -sigma.re)?)?)
        } else {
            let ac = forms.a.to_complex();
            Factor::Complex(SparseLu::factor(&ac.lin_comb(
                C::new(1.0, 0.0),
                &b,
                -sigma,
            )?)?)
        };
        let ratio = match &factor {
            Factor::Real(lu) => lu.pivot_ratio(),
            Factor::Complex(lu) => lu.pivot_ratio(),
        };
        if ratio < COLLISION_PIVOT_RATIO {
            return Err(Error::Singular { pivot: 0 });
        }
        let b_one = b.mul_vec(&vec![C::new(1.0, 0.0); b.nrows()]);
        let one_b_one: C = b_one.iter().sum();
        if one_b_one.norm() <= 1e-12 * (forms.inclusion_area + forms.shell_area) {
            return Err(Error::Invalid(format!(
                "delta = {delta} makes the total mass of the constant vanish"
            )));
        }
        Ok(PencilOperator {
            a: &forms.a,
            b,
            sigma,
            factor,
            b_one,
            one_b_one,
        })
    }

    pub fn b(&self) -> &SparseMatrix<C> {
        &self.b
    }
}

impl ShiftInvertOperator for PencilOperator<'_> {
    fn dim(&self) -> usize {
        self.b.nrows()
    }

    fn sigma(&self) -> C {
        self.sigma
    }

    fn apply(&self, x: &[C]) -> Vec<C> {
        let y = self.b.mul_vec(x);
        match &self.factor {
            Factor::Complex(lu) => lu.solve(&y),
            Factor::Real(lu) => {
                let re: Vec<f64> = y.iter().map(|v| v.re).collect();
                let im: Vec<f64> = y.iter().map(|v| v.im).collect();
                let (zr, zi) = (lu.solve(&re), lu.solve(&im));
                zr.into_iter().zip(zi).map(|(r, i)| C::new(r, i)).collect()
            }
        }
    }

    fn apply_b(&self, x: &[C]) -> Vec<C> {
        self.b.mul_vec(x)
    }

    fn residual(&self, lambda: C, x: &[C]) -> f64 {
        let bx = self.b.mul_vec(x);
        let mut r = vec![C::new(0.0, 0.0); x.len()];
        for (i, ri) in r.iter_mut().enumerate() {
            let mut ax = C::new(0.0, 0.0);
            for (j, v) in self.a.row(i) {
                ax += x[j] * v;
            }
            *ri = ax - lambda * bx[i];
        }
        norm2(&r) / norm2(x)
    }

    fn project(&self, x: &mut [C]) {
        let c: C = self
            .b_one
            .iter()
            .zip(x.iter())
            .map(|(a, b)| a * b)
            .sum::<C>()
            / self.one_b_one;
        for v in x.iter_mut() {
            *v -= c;
        }
    }
}

fn solve_pencil(
    forms: &AssembledForms,
    delta: C,
    sigma: C,
    opts: &ArnoldiOptions,
    singular: impl Fn(C) -> Error,
) -> Result<Spectrum> {
    let op = match PencilOperator::new(forms, delta, sigma) {
        Err(Error::Singular { .. }) => {
            let retry = sigma + 1e-4 * sigma.norm().max(1.0);
            match PencilOperator::new(forms, delta, retry) {
                Err(Error::Singular { .. }) => return Err(singular(sigma)),
                r => r?,
            }
        }
        r => r?,
    };
    let (ritz, stats) = shift_invert_arnoldi(&op, opts)?;
    let mut pairs: Vec<EigenPair> = ritz
        .into_iter()
        .map(|p| EigenPair {
            lambda: p.lambda,
            vector: p.vector,
            residual: p.residual,
        })
        .collect();
    pairs.sort_by(|a, b| {
        (a.lambda - sigma)
            .norm()
            .total_cmp(&(b.lambda - sigma).norm())
            .then(a.lambda.re.total_cmp(&b.lambda.re))
    });
    let mut warnings = Vec::new();
    let radius = validity_radius(forms);
    if delta.norm() >= radius {
        warnings.push(format!(
            "|delta| = {:.6} lies outside the disk |delta| < |D|/|shell| = {:.6}",
            delta.norm(),
            radius
        ));
    }
    Ok(Spectrum {
        delta,
        sigma: op.sigma,
        pairs,
        stats,
        warnings,
    })
}

/// Smallest `count` nonzero eigenvalues of `(A, M_D)`, ascending.
pub fn limit_spectrum(forms: &AssembledForms, count: usize) -> Result<Spectrum> {
    let opts = ArnoldiOptions {
        count,
        ..Default::default()
    };
    limit_spectrum_with(forms, &opts)
}

pub fn limit_spectrum_with(forms: &AssembledForms, opts: &ArnoldiOptions) -> Result<Spectrum> {
    let sigma = C::new(-1.0, 0.0);
    let mut s = solve_pencil(forms, C::new(0.0, 0.0), sigma, opts, |s| {
        Error::ShiftCollision {
            sigma: s.to_string(),
        }
    })?;
    for p in &mut s.pairs {
        // The pencil is real symmetric: drop rounding noise.
        p.lambda = C::new(p.lambda.re, 0.0);
        for v in &mut p.vector {
            v.im = 0.0;
        }
        let eta: f64 = forms.m_d.form(
            &p.vector.iter().map(|v| v.re).collect::<Vec<_>>(),
            &p.vector.iter().map(|v| v.re).collect::<Vec<_>>(),
        );
        for v in &mut p.vector {
            *v /= eta.sqrt();
        }
        fix_sign(&mut p.vector);
    }
    s.pairs.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    Ok(s)
}

/// Eigenpairs of `(A, M_D + δ M_S)` nearest `target`.
pub fn delta_spectrum(
    forms: &AssembledForms,
    delta: C,
    target: C,
    count: usize,
) -> Result<Spectrum> {
    let opts = ArnoldiOptions {
        count,
        ..Default::default()
    };
    delta_spectrum_with(forms, delta, target, &opts)
}

pub fn delta_spectrum_with(
    forms: &AssembledForms,
    delta: C,
    target: C,
    opts: &ArnoldiOptions,
) -> Result<Spectrum> {
    solve_pencil(forms, delta, target, opts, |_| Error::DiscreteResonance {
        delta: delta.to_string(),
    })
}

/// Spread of a nodal vector over the interface ring relative to its
/// largest entry; near zero for rotationally invariant modes.
pub fn interface_variation(forms: &AssembledForms, v: &[C]) -> f64 {
    let ring: Vec<C> = forms.interface_nodes.iter().map(|&i| v[i]).collect();
    let mean: C = ring.iter().sum::<C>() / ring.len() as f64;
    let spread = ring.iter().map(|x| (x - mean).norm()).fold(0.0, f64::max);
    let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    spread / scale
}

/// `u_iᵀ B_δ u_j − δ_ij`, maximized over the given pairs.
pub fn bilinear_orthonormality_defect(b: &SparseMatrix<C>, pairs: &[EigenPair]) -> f64 {
    let bv: Vec<Vec<C>> = pairs.iter().map(|p| b.mul_vec(&p.vector)).collect();
    let mut worst = 0.0f64;
    for (i, p) in pairs.iter().enumerate() {
        for (j, bq) in bv.iter().enumerate() {
            let g: C = p.vector.iter().zip(bq).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    worst
}
