use crate::error::{Error, Result};

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "spherical Bessel argument must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

/// Ascending series for `j_n(x)`, accurate while `x²` is small next to `2n+3`.
fn series(n: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 0..n {
        lead *= x / (2 * k + 3) as f64;
    }
    // lead = x^n / (2n+1)!!
    let y = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= y / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
    }
    lead * sum
}

fn closed(n: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    match n {
        0 => s / x,
        1 => s / (x * x) - c / x,
        2 => (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x),
        _ => unreachable!(),
    }
}

fn use_series(n: usize, x: f64) -> bool {
    x < 0.5 || x * x < (2 * n + 3) as f64 * 0.5
}

/// `j_0(x) .. j_nmax(x)` for `x > 0`.
pub fn spherical_bessel_array(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_arg(x)?;
    let mut out = vec![0.0; nmax + 1];
    if x >= nmax as f64 {
        out[0] = if use_series(0, x) {
            series(0, x)
        } else {
            closed(0, x)
        };
        if nmax >= 1 {
            out[1] = if use_series(1, x) {
                series(1, x)
            } else {
                closed(1, x)
            };
        }
        for k in 1..nmax {
            out[k + 1] = (2 * k + 1) as f64 / x * out[k] - out[k - 1];
        }
        // the first orders are better from closed forms or the series
        for (k, o) in out.iter_mut().enumerate().take(nmax.min(2) + 1) {
            *o = if use_series(k, x) {
                series(k, x)
            } else {
                closed(k, x)
            };
        }
        return Ok(out);
    }
    // Miller: backward recurrence from well above max(nmax, x)
    let start = nmax.max(x.ceil() as usize) + 30 + (2.0 * (nmax as f64 + x).sqrt()) as usize;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut vals = vec![0.0; nmax + 1];
    for k in (0..start).rev() {
        // j_k from j_{k+1}, j_{k+2}
        let jm = (2 * k + 3) as f64 / x * j - jp1;
        jp1 = j;
        j = jm;
        if k <= nmax {
            vals[k] = j;
        }
        if j.abs() > 1e250 {
            jp1 *= 1e-250;
            j *= 1e-250;
            for v in vals.iter_mut() {
                *v *= 1e-250;
            }
        }
        if k == 0 {
            break;
        }
    }
    // here j = unnormalized j_0, jp1 = unnormalized j_1
    let t0 = closed(0, x);
    let t1 = if use_series(1, x) {
        series(1, x)
    } else {
        closed(1, x)
    };
    let scale = if t0.abs() >= t1.abs() {
        t0 / j
    } else {
        t1 / jp1
    };
    for (k, v) in vals.iter_mut().enumerate() {
        *v = if use_series(k, x) {
            series(k, x)
        } else {
            *v * scale
        };
    }
    out.copy_from_slice(&vals);
    Ok(out)
}

/// `(j_n(x), j_n'(x))` for `x > 0`.
pub fn spherical_bessel(n: usize, x: f64) -> Result<(f64, f64)> {
    let (j, dj, _) = spherical_bessel_d2(n, x)?;
    Ok((j, dj))
}

/// Value and first two derivatives, the second obtained by differentiating
/// the recurrence `j_n' = j_{n-1} − (n+1) j_n / x`.
pub fn spherical_bessel_d2(n: usize, x: f64) -> Result<(f64, f64, f64)> {
    check_arg(x)?;
    let js = spherical_bessel_array(n + 1, x)?;
    let jn = js[n];
    if n == 0 {
        let j1 = js[1];
        let dj = -j1;
        // j_1' = j_0 − 2 j_1 / x
        let d2 = -(js[0] - 2.0 * j1 / x);
        return Ok((jn, dj, d2));
    }
    let jm = js[n - 1];
    let nf = n as f64;
    let dj = jm - (nf + 1.0) / x * jn;
    // j_{n-1}' = (n−1) j_{n-1} / x − j_n
    let djm = (nf - 1.0) / x * jm - jn;
    let d2 = djm + (nf + 1.0) / (x * x) * jn - (nf + 1.0) / x * dj;
    Ok((jn, dj, d2))
}

/// Limit at the origin: `(j_n(0), j_n'(0))`.
pub fn spherical_bessel_origin(n: usize) -> (f64, f64) {
    match n {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0 / 3.0),
        _ => (0.0, 0.0),
    }
}

/// `j_n(x)/x`, finite as `x → 0` for `n ≥ 1`.
pub fn spherical_bessel_over_x(n: usize, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if n == 1 {
            1.0 / 3.0
        } else if n == 0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(spherical_bessel(n, x)?.0 / x)
}

/// Coarse scan followed by bisection. `f` must be continuous on `(x0, ∞)`.
pub(crate) fn scan_zeros(
    f: impl Fn(f64) -> Result<f64>,
    count: usize,
    x0: f64,
    step: f64,
) -> Result<Vec<f64>> {
    let mut zeros = Vec::with_capacity(count);
    let mut a = x0;
    let mut fa = f(a)?;
    let mut guard = 0usize;
    while zeros.len() < count {
        let b = a + step;
        let fb = f(b)?;
        if fb == 0.0 {
            zeros.push(b);
            a = b + 1e-9;
            fa = f(a)?;
            continue;
        }
        if fa * fb < 0.0 {
            zeros.push(bisect(&f, a, b, fa)?);
        }
        a = b;
        fa = fb;
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::Domain("zero scan did not terminate".into()));
        }
    }
    Ok(zeros)
}

pub(crate) fn bisect(
    f: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
) -> Result<f64> {
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The first `count` positive zeros of `j_n`, increasing.
pub fn bessel_zeros(n: usize, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("count must be at least 1".into()));
    }
    let step = (std::f64::consts::PI / 4.0).min(1.0);
    // j_n has no zeros below n
    let x0 = (n as f64).max(step);
    let mut zeros = scan_zeros(|x| Ok(spherical_bessel(n, x)?.0), count, x0, step)?;
    for z in &mut zeros {
        // Newton polish; the zeros are simple.
        for _ in 0..3 {
            let (j, dj) = spherical_bessel(n, *z)?;
            let next = *z - j / dj;
            if (next - *z).abs() > 1e-10 || spherical_bessel(n, next)?.0.abs() > j.abs() {
                break;
            }
            *z = next;
        }
    }
    Ok(zeros)
}
