use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::scaled_bessel;

type C = Complex64;

/// Polarizations of the concentric-sphere problem with shell permittivity δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionFamily {
    /// `E = ∇×(f(r)V)`: has a radial part; at δ → 0 it tends to the
    /// electrostatic resonances.
    RadialE,
    /// `E = f(r)V`: purely tangential; at δ = 1 the PEC ball of radius R.
    TangentialE,
}

impl DispersionFamily {
    pub fn name(&self) -> &'static str {
        match self {
            DispersionFamily::RadialE => "radial",
            DispersionFamily::TangentialE => "tangential",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRoot {
    pub delta: C,
    pub k: C,
    pub lambda: C,
    pub iterations: usize,
    /// `|F(k)|` at the returned root, F scaled to unit size at the seed.
    pub residual: f64,
    pub warnings: Vec<String>,
}

/// `(f, (r f)')` at r for the shell solution `β f_j + γ f_y`, where
/// `f_j = j_n(κr)/κⁿ` and `f_y = κ^{n+1} y_n(κr)`; both depend on κ² only.
fn radial_pair(n: usize, kappa: C, r: f64) -> ([C; 2], [C; 2]) {
    let z = kappa * r;
    let sb = scaled_bessel(n, z);
    let nf = n as f64;
    let rn = r.powi(n as i32);
    let rm = r.powi(-(n as i32) - 1);
    let fj = rn * sb.e[1];
    let dfj = rn * (sb.e[0] - nf * sb.e[1]);
    let fy = rm * sb.g[1];
    let dfy = rm * (-nf * sb.g[1] + z * z * sb.g[0]);
    ([fj, dfj], [fy, dfy])
}

/// Continuity determinant in k, with the core factor kⁿ divided out.
pub fn dispersion_function(family: DispersionFamily, n: usize, r_outer: f64, delta: C, k: C) -> C {
    let kappa = delta.sqrt() * k;
    let core = scaled_bessel(n, k);
    let nf = n as f64;
    // j_n(k)/kⁿ and (j_n(k) + k j_n'(k))/kⁿ
    let j = core.e[1];
    let dj = core.e[0] - nf * core.e[1];
    let (fj_r, fy_r) = radial_pair(n, kappa, r_outer);
    let (fj, fy) = radial_pair(n, kappa, 1.0);
    match family {
        DispersionFamily::RadialE => {
            let (b, g) = (fy_r[1], -fj_r[1]);
            let p = b * fj[0] + g * fy[0];
            let q = b * fj[1] + g * fy[1];
            delta * dj * p - j * q
        }
        DispersionFamily::TangentialE => {
            let (b, g) = (fy_r[0], -fj_r[0]);
            let p = b * fj[0] + g * fy[0];
            let q = b * fj[1] + g * fy[1];
            j * q - dj * p
        }
    }
}

fn branch_warning(delta: C) -> Option<String> {
    (delta.im == 0.0 && delta.re < 0.0).then(|| {
        format!("delta = {delta} lies on the branch cut of sqrt(delta); the dispersion depends on delta k^2 only")
    })
}

/// Complex Newton from `seed` with a central-difference derivative.
pub fn concentric_dispersion(
    family: DispersionFamily,
    n: usize,
    r_outer: f64,
    delta: C,
    seed: C,
) -> Result<DispersionRoot> {
    if n == 0 {
        return Err(Error::Invalid(
            "dispersion degree must be at least 1".into(),
        ));
    }
    if !(r_outer > 1.0) {
        return Err(Error::Invalid(format!(
            "outer radius must exceed 1, got {r_outer}"
        )));
    }
    if delta.norm() == 0.0 || !delta.re.is_finite() || !delta.im.is_finite() {
        return Err(Error::Invalid(format!(
            "dispersion needs a finite delta != 0, got {delta}"
        )));
    }
    if seed.norm() == 0.0 {
        return Err(Error::Invalid("Newton seed must be nonzero".into()));
    }
    let f = |k: C| dispersion_function(family, n, r_outer, delta, k);
    let scale = f(seed).norm().max(1e-300);
    let mut k = seed;
    let mut best = Vec::new();
    for it in 1..=80 {
        let fk = f(k);
        let h = 1e-6 * k.norm();
        let d = (f(k + h) - f(k - h)) / (2.0 * h);
        if d.norm() == 0.0 {
            break;
        }
        let mut step = fk / d;
        if step.norm() > 0.25 * k.norm() {
            step *= 0.25 * k.norm() / step.norm();
        }
        k -= step;
        best.push(fk.norm() / scale);
        if step.norm() <= 1e-15 * k.norm() || fk.norm() == 0.0 {
            let residual = f(k).norm() / scale;
            return Ok(DispersionRoot {
                delta,
                k,
                lambda: k * k,
                iterations: it,
                residual,
                warnings: branch_warning(delta).into_iter().collect(),
            });
        }
    }
    best.sort_by(f64::total_cmp);
    best.truncate(3);
    Err(Error::NoConvergence {
        iterations: 80,
        best_residuals: best,
    })
}

/// Roots along a δ path; each start is the previous root when `continue_seed`
/// is set, the common seed otherwise (which allows parallel solves).
pub fn dispersion_sweep(
    family: DispersionFamily,
    n: usize,
    r_outer: f64,
    deltas: &[C],
    seed: C,
    continue_seed: bool,
) -> Result<Vec<DispersionRoot>> {
    let mut roots = if continue_seed {
        let mut out: Vec<DispersionRoot> = Vec::with_capacity(deltas.len());
        for &d in deltas {
            let s = out.last().map_or(seed, |r| r.k);
            out.push(concentric_dispersion(family, n, r_outer, d, s)?);
        }
        out
    } else {
        deltas
            .par_iter()
            .map(|&d| concentric_dispersion(family, n, r_outer, d, seed))
            .collect::<Result<Vec<_>>>()?
    };
    for i in 1..roots.len() {
        let (a, b) = (deltas[i - 1], deltas[i]);
        // the segment meets the real axis at a negative real part
        let crosses = a.im * b.im < 0.0 && {
            let t = a.im / (a.im - b.im);
            a.re + t * (b.re - a.re) < 0.0
        };
        if crosses {
            roots[i].warnings.push(format!(
                "arg(delta) passes ±pi between {a} and {b}; sqrt(delta) changes sheet"
            ));
        }
    }
    Ok(roots)
}
