use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Degree and order of a real spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HarmonicIndex {
    pub n: usize,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(n: usize, m: i32) -> Result<Self> {
        if m.unsigned_abs() as usize > n {
            return Err(Error::Invalid(format!(
                "harmonic order m={m} exceeds degree n={n}"
            )));
        }
        Ok(HarmonicIndex { n, m })
    }

    /// `√(n(n+1))`
    pub fn root_ll1(&self) -> f64 {
        ((self.n * (self.n + 1)) as f64).sqrt()
    }
}

/// A point of the unit sphere in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    theta: f64,
    phi: f64,
}

impl SurfacePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::Invalid(format!(
                "invalid surface point θ={theta}, φ={phi}"
            )));
        }
        let phi = phi.rem_euclid(2.0 * PI);
        Ok(SurfacePoint { theta, phi })
    }

    /// Direction of a nonzero 3-vector.
    pub fn from_direction(x: Vec3) -> Result<Self> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if !(r > 0.0) {
            return Err(Error::Invalid("direction of the zero vector".into()));
        }
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        let phi = x[1].atan2(x[0]);
        SurfacePoint::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn omega(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    fn theta_hat(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct * cp, ct * sp, -st]
    }

    fn phi_hat(&self) -> Vec3 {
        let (sp, cp) = self.phi.sin_cos();
        [-sp, cp, 0.0]
    }
}

/// `Q^m_n(x)` with `P^m_n(cos θ) = sin^m θ · Q^m_n(cos θ)` (no Condon-Shortley
/// phase), and its derivative in `x`.
fn legendre_q(n: usize, m: usize, x: f64) -> (f64, f64) {
    let mut qmm = 1.0;
    for k in 1..=m {
        qmm *= (2 * k - 1) as f64;
    }
    if n == m {
        return (qmm, 0.0);
    }
    let mut q0 = qmm;
    let mut d0 = 0.0;
    let mut q1 = x * (2 * m + 1) as f64 * qmm;
    let mut d1 = (2 * m + 1) as f64 * qmm;
    for l in m + 2..=n {
        let a = (2 * l - 1) as f64;
        let b = (l + m - 1) as f64;
        let c = (l - m) as f64;
        let q2 = (x * a * q1 - b * q0) / c;
        let d2 = (a * q1 + x * a * d1 - b * d0) / c;
        q0 = q1;
        d0 = d1;
        q1 = q2;
        d1 = d2;
    }
    (q1, d1)
}

fn norm_const(n: usize, m: usize) -> f64 {
    // (n-m)!/(n+m)! as a product
    let mut ratio = 1.0;
    for k in (n - m + 1)..=(n + m) {
        ratio /= k as f64;
    }
    let base = ((2 * n + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    if m == 0 {
        base
    } else {
        base * 2f64.sqrt()
    }
}

/// Real spherical harmonic with unit `L²(S²)` norm and its surface gradient
/// in Cartesian components. `m > 0` uses `cos(mφ)`, `m < 0` uses `sin(|m|φ)`.
/// No division by `sin θ` occurs, so the poles need no special casing.
pub fn real_spherical_harmonic(idx: HarmonicIndex, p: SurfacePoint) -> (f64, Vec3) {
    let n = idx.n;
    let am = idx.m.unsigned_abs() as usize;
    let (s, c) = p.theta.sin_cos();
    let (q, dq) = legendre_q(n, am, c);
    let k = norm_const(n, am);
    let mf = am as f64;
    let (t, dt) = if idx.m > 0 {
        ((mf * p.phi).cos(), -mf * (mf * p.phi).sin())
    } else if idx.m < 0 {
        ((mf * p.phi).sin(), mf * (mf * p.phi).cos())
    } else {
        (1.0, 0.0)
    };
    let sm = s.powi(am as i32);
    let y = k * sm * q * t;
    // ∂θ [s^m Q(cos θ)] = m s^{m-1} c Q − s^{m+1} Q'
    let (d_theta, d_phi_over_s) = if am == 0 {
        (-s * dq * k * t, 0.0)
    } else {
        let sm1 = s.powi(am as i32 - 1);
        (k * t * (mf * sm1 * c * q - sm * s * dq), k * dt * sm1 * q)
    };
    let th = p.theta_hat();
    let ph = p.phi_hat();
    let g = [
        d_theta * th[0] + d_phi_over_s * ph[0],
        d_theta * th[1] + d_phi_over_s * ph[1],
        d_theta * th[2] + d_phi_over_s * ph[2],
    ];
    (y, g)
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `(U, V)` with `U = ∇_S Y / √(n(n+1))` and `V = ω × U`.
pub fn vector_harmonics(idx: HarmonicIndex, p: SurfacePoint) -> Result<(Vec3, Vec3)> {
    if idx.n == 0 {
        return Err(Error::Invalid("vector harmonics need n ≥ 1".into()));
    }
    let (_, g) = real_spherical_harmonic(idx, p);
    let a = 1.0 / idx.root_ll1();
    let u = [g[0] * a, g[1] * a, g[2] * a];
    let v = cross(p.omega(), u);
    Ok((u, v))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
