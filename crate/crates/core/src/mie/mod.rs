//! Resonances of a unit ball core inside a perfectly conducting sphere of
//! radius R, with the shell permittivity at zero or at a complex δ.

mod dispersion;
mod fields;
mod io;

pub use dispersion::{
    concentric_dispersion, dispersion_function, dispersion_sweep, DispersionFamily, DispersionRoot,
};
pub use fields::{
    evaluate_fields, field_at, field_in_layer, interface_report, interior_solution,
    residual_checks, sample_points, write_samples_csv, FieldSample, InterfaceReport,
    InteriorSolution, Layer, ResidualReport,
};
pub use io::{load_mode, parse_mode, save_mode, write_mode};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactors};
use crate::specfun::{bessel_zeros, bisect, spherical_bessel, spherical_bessel_d2, HarmonicIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Tangential trace `V`, shell field a gradient, shell H zero.
    Electrostatic,
    /// Tangential trace `U`, shell H nonzero.
    NonElectrostatic,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Electrostatic => "electrostatic",
            Family::NonElectrostatic => "nonelectrostatic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MieMode {
    pub family: Family,
    pub idx: HarmonicIndex,
    /// Root index (electrostatic) or interval index (non-electrostatic), from 1.
    pub index: usize,
    pub k: f64,
    pub r_outer: f64,
    /// `(A, B)` or `(C, D)`.
    pub coeffs: [f64; 2],
}

impl MieMode {
    pub fn lambda(&self) -> f64 {
        self.k * self.k
    }
}

fn check_geometry(n: usize, m: i32, r_outer: f64, index: usize) -> Result<HarmonicIndex> {
    if n == 0 {
        return Err(Error::Invalid("mode degree must be at least 1".into()));
    }
    if !(r_outer > 1.0) || !r_outer.is_finite() {
        return Err(Error::Invalid(format!(
            "outer radius must exceed 1, got {r_outer}"
        )));
    }
    if index == 0 {
        return Err(Error::Invalid(
            "root and interval indices start at 1".into(),
        ));
    }
    HarmonicIndex::new(n, m)
}

/// Solves `x + y = s`, `x R^a + y R^b = 0`.
fn outer_system(s: f64, r: f64, a: f64, b: f64) -> Result<[f64; 2]> {
    let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![r.powf(a), r.powf(b)]]);
    let x = LuFactors::factor(&m)?.solve(&[s, 0.0]);
    Ok([x[0], x[1]])
}

/// `(A, B)` with `A + B = 1/√(n(n+1))`, `A Rⁿ + B R^{−n−1} = 0`.
pub fn electrostatic_coeffs(n: usize, r_outer: f64) -> Result<[f64; 2]> {
    let s = 1.0 / ((n * (n + 1)) as f64).sqrt();
    outer_system(s, r_outer, n as f64, -(n as f64) - 1.0)
}

/// `(C, D)` with `C + D = −√(p(p+1))`, `C R^p + D R^{−p−1} = 0`.
pub fn nonelectrostatic_coeffs(p: usize, r_outer: f64) -> Result<[f64; 2]> {
    let s = -((p * (p + 1)) as f64).sqrt();
    outer_system(s, r_outer, p as f64, -(p as f64) - 1.0)
}

pub fn electrostatic_mode(n: usize, m: i32, root: usize, r_outer: f64) -> Result<MieMode> {
    let idx = check_geometry(n, m, r_outer, root)?;
    let k = bessel_zeros(n, root)?[root - 1];
    Ok(MieMode {
        family: Family::Electrostatic,
        idx,
        index: root,
        k,
        r_outer,
        coeffs: electrostatic_coeffs(n, r_outer)?,
    })
}

/// Shell-side tangential H constant, `−((p+1)C − pD)/√(p(p+1))`.
pub fn matching_constant(p: usize, coeffs: [f64; 2]) -> f64 {
    let pf = p as f64;
    -((pf + 1.0) * coeffs[0] - pf * coeffs[1]) / (pf * (pf + 1.0)).sqrt()
}

/// `m(k) = 1 + k j_p'(k)/j_p(k) − K`, the jump of the U component of
/// `ikH` across the interface. Zero at a mode.
pub fn matching_function(p: usize, coeffs: [f64; 2], k: f64) -> Result<f64> {
    let (j, dj) = spherical_bessel(p, k)?;
    Ok(1.0 + k * dj / j - matching_constant(p, coeffs))
}

/// Alternative readings of the shell constant, for comparison against the
/// field-level value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingReadings {
    /// `−((p+1)C − pD)/√(p(p+1))`, from the curl of the shell field.
    pub field: f64,
    /// `−((p+1)C − pD)` without the harmonic normalization.
    pub unnormalized: f64,
    /// `−((p+1)C − D)`.
    pub single_d: f64,
}

impl MatchingReadings {
    pub fn new(p: usize, coeffs: [f64; 2]) -> Self {
        let pf = p as f64;
        let [c, d] = coeffs;
        MatchingReadings {
            field: matching_constant(p, coeffs),
            unnormalized: -((pf + 1.0) * c - pf * d),
            single_d: -((pf + 1.0) * c - d),
        }
    }

    /// `|1 + k j'/j − K|` for each reading.
    pub fn residuals(&self, p: usize, k: f64) -> Result<[f64; 3]> {
        let (j, dj) = spherical_bessel(p, k)?;
        let lhs = 1.0 + k * dj / j;
        Ok([
            (lhs - self.field).abs(),
            (lhs - self.unnormalized).abs(),
            (lhs - self.single_d).abs(),
        ])
    }
}

pub fn nonelectrostatic_mode(p: usize, q: i32, r_outer: f64, interval: usize) -> Result<MieMode> {
    let idx = check_geometry(p, q, r_outer, interval)?;
    let coeffs = nonelectrostatic_coeffs(p, r_outer)?;
    let z = bessel_zeros(p, interval + 1)?;
    let (a, b) = (z[interval - 1], z[interval]);
    let f = |k: f64| matching_function(p, coeffs, k);
    let eps = 1e-9 * (b - a);
    let (lo, hi) = (a + eps, b - eps);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(flo * fhi < 0.0) {
        return Err(Error::NoSignChange {
            a: lo,
            b: hi,
            fa: flo,
            fb: fhi,
        });
    }
    let mut k = bisect(&f, lo, hi, flo)?;
    // Newton polish inside the bracket.
    let kc = matching_constant(p, coeffs);
    for _ in 0..3 {
        let (j, dj, d2) = spherical_bessel_d2(p, k)?;
        let g = 1.0 + k * dj / j - kc;
        let dg = (dj + k * d2) / j - k * dj * dj / (j * j);
        let next = k - g / dg;
        if !(next > lo && next < hi) || g == 0.0 {
            break;
        }
        if f(next)?.abs() >= g.abs() {
            break;
        }
        k = next;
    }
    Ok(MieMode {
        family: Family::NonElectrostatic,
        idx,
        index: interval,
        k,
        r_outer,
        coeffs,
    })
}
