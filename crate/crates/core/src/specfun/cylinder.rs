use super::spherical::scan_zeros;
use crate::error::{Error, Result};

fn series(m: usize, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=m {
        lead *= h / k as f64;
    }
    let y = -h * h;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= y / (k as f64 * (m + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 300 {
            break;
        }
    }
    lead * sum
}

/// `J_0(x) .. J_mmax(x)` for `x ≥ 0`.
pub fn cylinder_bessel_array(mmax: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "cylinder Bessel argument must be nonnegative, got {x}"
        )));
    }
    if x == 0.0 {
        let mut v = vec![0.0; mmax + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    if x < 1.0 {
        return Ok((0..=mmax).map(|m| series(m, x)).collect());
    }
    // Miller with the normalization J_0 + 2 Σ J_2k = 1
    let mut start = mmax.max(x.ceil() as usize) + 40 + (3.0 * x.cbrt()) as usize * 4;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0; mmax + 1];
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    for k in (0..start).rev() {
        // J_k = 2(k+1)/x J_{k+1} − J_{k+2}
        let jk = 2.0 * (k + 1) as f64 / x * j - jp1;
        jp1 = j;
        j = jk;
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k <= mmax {
            vals[k] = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in vals.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    for v in vals.iter_mut() {
        *v /= norm;
    }
    // tiny arguments relative to the order: the series is more accurate
    for (m, v) in vals.iter_mut().enumerate() {
        if x * x < 0.25 * (m + 1) as f64 {
            *v = series(m, x);
        }
    }
    Ok(vals)
}

/// `(J_m(x), J_m'(x))`.
pub fn cylinder_bessel(m: usize, x: f64) -> Result<(f64, f64)> {
    let js = cylinder_bessel_array(m + 1, x)?;
    let d = if m == 0 {
        -js[1]
    } else {
        0.5 * (js[m - 1] - js[m + 1])
    };
    Ok((js[m], d))
}

/// Positive zeros of `J_m` (or of `J_m'` when `derivative` is set).
pub fn cylinder_bessel_zeros(m: usize, count: usize, derivative: bool) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("count must be at least 1".into()));
    }
    let step = std::f64::consts::PI / 4.0;
    // J_0' vanishes at the origin; start just above it
    let x0 = if m == 0 {
        1e-3
    } else {
        (m as f64).max(1e-3) * 0.999
    };
    scan_zeros(
        |x| {
            let (j, dj) = cylinder_bessel(m, x)?;
            Ok(if derivative { dj } else { j })
        },
        count,
        x0,
        step,
    )
}
