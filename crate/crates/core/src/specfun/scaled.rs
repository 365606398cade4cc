use num_complex::Complex64;

type C = Complex64;

/// Even, entire rescalings of the spherical Bessel functions of a complex
/// argument: `e_n(z) = j_n(z)/zⁿ` and `g_n(z) = y_n(z)·z^{n+1}`. Both depend
/// on `z²` only, so they carry no branch cut when `z = √δ·k`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledBessel {
    /// `e_{n-1}(z), e_n(z)`
    pub e: [C; 2],
    /// `g_{n-1}(z), g_n(z)`
    pub g: [C; 2],
}

fn e_series(n: usize, z2: C) -> C {
    let mut df = 1.0;
    for k in 0..=n {
        df *= (2 * k + 1) as f64;
    }
    // df = (2n+1)!!
    let y = -z2 * 0.5;
    let mut term = C::new(1.0 / df, 0.0);
    let mut sum = term;
    for k in 1..400 {
        term = term * y / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `sin z / z` as a function of z² near the origin, exact elsewhere.
fn sinc(z: C) -> C {
    if z.norm() < 0.5 {
        let z2 = z * z;
        let mut term = C::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..30 {
            term = -term * z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        z.sin() / z
    }
}

fn e_value(n: usize, z: C) -> C {
    let threshold = ((4 * n + 6) as f64).sqrt().max(n as f64 + 1.0);
    if z.norm() < threshold {
        return e_series(n, z * z);
    }
    let j0 = z.sin() / z;
    if n == 0 {
        return j0;
    }
    let mut jm = j0;
    let mut j = z.sin() / (z * z) - z.cos() / z;
    for k in 1..n {
        let jp = j * ((2 * k + 1) as f64) / z - jm;
        jm = j;
        j = jp;
    }
    j / z.powu(n as u32)
}

/// Scaled functions of orders `n-1` and `n` (n ≥ 1).
pub fn scaled_bessel(n: usize, z: C) -> ScaledBessel {
    assert!(n >= 1, "scaled Bessel pair needs n ≥ 1");
    let z2 = z * z;
    // g_{-1} = sin z / z, g_0 = −cos z, g_{k+1} = (2k+1) g_k − z² g_{k-1}
    let mut gm = sinc(z);
    let mut g = -z.cos();
    for k in 0..n {
        let gp = g * ((2 * k + 1) as f64) - z2 * gm;
        gm = g;
        g = gp;
    }
    ScaledBessel {
        e: [e_value(n - 1, z), e_value(n, z)],
        g: [gm, g],
    }
}
