use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Family, MieMode};
use crate::error::{Error, Result};
use crate::specfun::{
    cross, dot, gauss_legendre, real_spherical_harmonic, spherical_bessel, vector_harmonics,
    HarmonicIndex, SurfacePoint, Vec3,
};

type C = Complex64;
type CVec3 = [C; 3];

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Core,
    Shell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub point: Vec3,
    pub e: CVec3,
    pub h: CVec3,
    pub layer: Layer,
}

/// Angular frame at `x`: `(r, Y, ω, U, V)`.
struct Frame {
    r: f64,
    y: f64,
    omega: Vec3,
    u: Vec3,
    v: Vec3,
}

fn frame(idx: HarmonicIndex, x: Vec3) -> Result<Frame> {
    let r = dot(x, x).sqrt();
    if !(r > 1e-12) {
        return Err(Error::Domain(
            "fields are not evaluated at the origin".into(),
        ));
    }
    let p = SurfacePoint::from_direction(x)?;
    let (y, _) = real_spherical_harmonic(idx, p);
    let (u, v) = vector_harmonics(idx, p)?;
    Ok(Frame {
        r,
        y,
        omega: p.omega(),
        u,
        v,
    })
}

/// `a Y ω + b U + c V`
fn combine(f: &Frame, a: C, b: C, c: C) -> CVec3 {
    std::array::from_fn(|i| a * f.y * f.omega[i] + b * f.u[i] + c * f.v[i])
}

fn zero3() -> CVec3 {
    [C::new(0.0, 0.0); 3]
}

fn add3(a: CVec3, b: CVec3) -> CVec3 {
    std::array::from_fn(|i| a[i] + b[i])
}

fn norm3(a: &CVec3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn cross_real(nu: Vec3, a: &CVec3) -> CVec3 {
    let re = cross(nu, a.map(|z| z.re));
    let im = cross(nu, a.map(|z| z.im));
    std::array::from_fn(|i| C::new(re[i], im[i]))
}

fn dot_real(nu: Vec3, a: &CVec3) -> C {
    (0..3).map(|i| nu[i] * a[i]).sum()
}

/// `(E, H)` of a mode from the formula of the requested layer, at any
/// nonzero point (the layer formulas extend analytically).
pub fn field_in_layer(mode: &MieMode, x: Vec3, layer: Layer) -> Result<(CVec3, CVec3)> {
    let f = frame(mode.idx, x)?;
    let n = mode.idx.n;
    let nf = n as f64;
    let s = mode.idx.root_ll1();
    let k = mode.k;
    let r = f.r;
    let [c0, c1] = mode.coeffs;
    let re = |v: f64| C::new(v, 0.0);
    Ok(match (mode.family, layer) {
        (Family::Electrostatic, Layer::Core) => {
            let (j1, dj1) = spherical_bessel(n, k)?;
            let c = 1.0 / (j1 + k * dj1);
            let (j, dj) = spherical_bessel(n, k * r)?;
            let e = combine(&f, re(c * s * j / r), re(c * (j + k * r * dj) / r), re(0.0));
            let h = combine(&f, re(0.0), re(0.0), I * k * c * j);
            (e, h)
        }
        (Family::Electrostatic, Layer::Shell) => {
            let a = c0 * nf * r.powf(nf - 1.0) - (nf + 1.0) * c1 * r.powf(-nf - 2.0);
            let b = (c0 * r.powf(nf - 1.0) + c1 * r.powf(-nf - 2.0)) * s;
            (combine(&f, re(a), re(b), re(0.0)), zero3())
        }
        (Family::NonElectrostatic, Layer::Core) => {
            let (j1, _) = spherical_bessel(n, k)?;
            let (j, dj) = spherical_bessel(n, k * r)?;
            let e = combine(&f, re(0.0), re(0.0), re(-j / j1));
            let ikh = combine(
                &f,
                re(s * j / (r * j1)),
                re((j + k * r * dj) / (r * j1)),
                re(0.0),
            );
            (e, ikh.map(|z| z / (I * k)))
        }
        (Family::NonElectrostatic, Layer::Shell) => {
            let a = (c0 * r.powf(nf) + c1 * r.powf(-nf - 1.0)) / s;
            let e = combine(&f, re(0.0), re(0.0), re(a));
            let ikh = combine(
                &f,
                re(-(c0 * r.powf(nf - 1.0) + c1 * r.powf(-nf - 2.0))),
                re(-((nf + 1.0) * c0 * r.powf(nf - 1.0) - nf * c1 * r.powf(-nf - 2.0)) / s),
                re(0.0),
            );
            (e, ikh.map(|z| z / (I * k)))
        }
    })
}

/// Core for `|x| ≤ 1`, shell for `1 < |x| ≤ R`.
pub fn field_at(mode: &MieMode, x: Vec3) -> Result<FieldSample> {
    let r = dot(x, x).sqrt();
    if r > mode.r_outer * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "point at radius {r} lies outside the outer sphere R = {}",
            mode.r_outer
        )));
    }
    let layer = if r <= 1.0 { Layer::Core } else { Layer::Shell };
    let (e, h) = field_in_layer(mode, x, layer)?;
    Ok(FieldSample {
        point: x,
        e,
        h,
        layer,
    })
}

pub fn evaluate_fields(mode: &MieMode, points: &[Vec3]) -> Result<Vec<FieldSample>> {
    points.iter().map(|&x| field_at(mode, x)).collect()
}

/// Interior Maxwell field in the unit ball for the tangential data
/// `ν × E = Σ (u U + v V)` at wavenumber k.
#[derive(Debug, Clone)]
pub struct InteriorSolution {
    k: f64,
    terms: Vec<(HarmonicIndex, f64, f64, f64, f64)>,
}

/// Terms are `(index, u, v)`. Returns the vanishing denominator when k is an
/// interior resonance of an active term.
pub fn interior_solution(terms: &[(HarmonicIndex, f64, f64)], k: f64) -> Result<InteriorSolution> {
    if !(k > 0.0) {
        return Err(Error::Invalid(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let mut out = Vec::with_capacity(terms.len());
    for &(idx, u, v) in terms {
        if idx.n == 0 {
            return Err(Error::Invalid(
                "tangential data has no n = 0 component".into(),
            ));
        }
        let (j, dj) = spherical_bessel(idx.n, k)?;
        let dr = j + k * dj;
        if u != 0.0 && j.abs() <= 1e-12 {
            return Err(Error::Denominator {
                n: idx.n,
                m: idx.m,
                which: format!("j_n(k) = {j:e}"),
            });
        }
        if v != 0.0 && dr.abs() <= 1e-12 {
            return Err(Error::Denominator {
                n: idx.n,
                m: idx.m,
                which: format!("j_n(k) + k j_n'(k) = {dr:e}"),
            });
        }
        out.push((idx, u, v, j, dr));
    }
    Ok(InteriorSolution { k, terms: out })
}

impl InteriorSolution {
    /// `(E, H)` with `∇×E = ikH`.
    pub fn fields(&self, x: Vec3) -> Result<(CVec3, CVec3)> {
        let k = self.k;
        let mut e = zero3();
        let mut h = zero3();
        for &(idx, u, v, j1, dr1) in &self.terms {
            let f = frame(idx, x)?;
            let r = f.r;
            let s = idx.root_ll1();
            let (j, dj) = spherical_bessel(idx.n, k * r)?;
            let radial = s * j / r;
            let tang = (j + k * r * dj) / r;
            let mut a = C::new(0.0, 0.0);
            let mut b = C::new(0.0, 0.0);
            let mut c = C::new(0.0, 0.0);
            let mut ha = C::new(0.0, 0.0);
            let mut hb = C::new(0.0, 0.0);
            let mut hc = C::new(0.0, 0.0);
            if v != 0.0 {
                a += v * radial / dr1;
                b += v * tang / dr1;
                hc += -k * k * v * j / dr1;
            }
            if u != 0.0 {
                c += -u * j / j1;
                ha += u * radial / j1;
                hb += u * tang / j1;
            }
            e = add3(e, combine(&f, a, b, c));
            h = add3(h, combine(&f, ha, hb, hc).map(|z| z / (I * k)));
        }
        Ok((e, h))
    }
}

/// Reproducible points of the ball of radius R at least `gap` away from
/// the origin, the interface and the outer sphere.
pub fn sample_points(r_outer: f64, count: usize, gap: f64, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let x: Vec3 = std::array::from_fn(|_| rng.gen_range(-r_outer..r_outer));
        let r = dot(x, x).sqrt();
        if r < gap || (r - 1.0).abs() < gap || r > r_outer - gap {
            continue;
        }
        pts.push(x);
    }
    pts
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `‖∇×∇×E − λ1_D E‖ / ‖λE‖`
    pub curl_curl: f64,
    /// `‖∇·E‖ / ‖kE‖`
    pub divergence: f64,
    /// `‖∇×E‖ / ‖kE‖` over shell points.
    pub shell_curl: f64,
    /// `‖∇×E − ikH‖ / ‖kE‖`
    pub faraday: f64,
    pub samples: usize,
}

/// Central finite-difference checks with step `h`, points within `gap` of
/// the interface excluded.
pub fn residual_checks(
    mode: &MieMode,
    count: usize,
    h: f64,
    gap: f64,
    seed: u64,
) -> Result<ResidualReport> {
    let pts = sample_points(mode.r_outer, count, gap.max(3.0 * h), seed);
    let lambda = mode.lambda();
    let k = mode.k;
    let (mut cc, mut lam_e, mut div, mut ke, mut curl_s, mut ke_s, mut far) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in &pts {
        let layer = if dot(x, x).sqrt() <= 1.0 {
            Layer::Core
        } else {
            Layer::Shell
        };
        let ev = |dx: [f64; 3]| -> Result<CVec3> {
            let y = [x[0] + dx[0], x[1] + dx[1], x[2] + dx[2]];
            Ok(field_in_layer(mode, y, layer)?.0)
        };
        let (e0, h0) = field_in_layer(mode, x, layer)?;
        let unit = |i: usize, s: f64| {
            let mut d = [0.0; 3];
            d[i] = s;
            d
        };
        // First derivatives d1[j][i] = ∂_j E_i and second derivatives.
        let mut d1 = [[C::new(0.0, 0.0); 3]; 3];
        let mut d2 = [[[C::new(0.0, 0.0); 3]; 3]; 3];
        for j in 0..3 {
            let p = ev(unit(j, h))?;
            let m = ev(unit(j, -h))?;
            for i in 0..3 {
                d1[j][i] = (p[i] - m[i]) / (2.0 * h);
                d2[j][j][i] = (p[i] - 2.0 * e0[i] + m[i]) / (h * h);
            }
            for l in (j + 1)..3 {
                let d = |a: f64, b: f64| {
                    let mut v = [0.0; 3];
                    v[j] = a;
                    v[l] = b;
                    v
                };
                let pp = ev(d(h, h))?;
                let pm = ev(d(h, -h))?;
                let mp = ev(d(-h, h))?;
                let mm = ev(d(-h, -h))?;
                for i in 0..3 {
                    let v = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                    d2[j][l][i] = v;
                    d2[l][j][i] = v;
                }
            }
        }
        let curl = [
            d1[1][2] - d1[2][1],
            d1[2][0] - d1[0][2],
            d1[0][1] - d1[1][0],
        ];
        let divergence: C = (0..3).map(|i| d1[i][i]).sum();
        let target = if layer == Layer::Core { lambda } else { 0.0 };
        for i in 0..3 {
            // (∇×∇×E)_i = ∂_i(∇·E) − ΔE_i
            let grad_div: C = (0..3).map(|j| d2[i][j][j]).sum();
            let lap: C = (0..3).map(|j| d2[j][j][i]).sum();
            cc += (grad_div - lap - target * e0[i]).norm_sqr();
            lam_e += (lambda * e0[i]).norm_sqr();
            far += (curl[i] - I * k * h0[i]).norm_sqr();
        }
        div += divergence.norm_sqr();
        ke += k * k * e0.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if layer == Layer::Shell {
            curl_s += curl.iter().map(|z| z.norm_sqr()).sum::<f64>();
            ke_s += k * k * e0.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    let ratio = |a: f64, b: f64| if b > 0.0 { (a / b).sqrt() } else { 0.0 };
    Ok(ResidualReport {
        curl_curl: ratio(cc, lam_e),
        divergence: ratio(div, ke),
        shell_curl: ratio(curl_s, ke_s),
        faraday: ratio(far, ke),
        samples: pts.len(),
    })
}

/// Suprema over a spherical product grid of the boundary and interface
/// conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceReport {
    /// `|E₊·ν|` at r = 1.
    pub core_normal_e: f64,
    /// `|H₊|` at r = 1.
    pub core_h: f64,
    pub tangential_e_jump: f64,
    pub tangential_h_jump: f64,
    pub normal_h_jump: f64,
    /// `|E₋×ν|` at r = R.
    pub outer_tangential_e: f64,
    /// `|∮_{r=R} E₋·ν|` by quadrature.
    pub outer_flux: f64,
    /// Largest `|H|` over shell and core grid radii.
    pub shell_h_max: f64,
    pub core_h_max: f64,
}

pub fn interface_report(mode: &MieMode) -> Result<InterfaceReport> {
    let n = mode.idx.n;
    let nt = 2 * n + 6;
    let np = 2 * n + 6;
    let (xs, ws) = gauss_legendre(nt);
    let mut dirs = Vec::with_capacity(nt * np);
    for (t, &ct) in xs.iter().enumerate() {
        let theta = ct.clamp(-1.0, 1.0).acos();
        for p in 0..np {
            let phi = 2.0 * std::f64::consts::PI * (p as f64 + 0.5) / np as f64;
            let sp = SurfacePoint::new(theta, phi)?;
            dirs.push((sp.omega(), ws[t] * 2.0 * std::f64::consts::PI / np as f64));
        }
    }
    let at = |w: Vec3, r: f64| [w[0] * r, w[1] * r, w[2] * r];
    let mut rep = InterfaceReport {
        core_normal_e: 0.0,
        core_h: 0.0,
        tangential_e_jump: 0.0,
        tangential_h_jump: 0.0,
        normal_h_jump: 0.0,
        outer_tangential_e: 0.0,
        outer_flux: 0.0,
        shell_h_max: 0.0,
        core_h_max: 0.0,
    };
    let big_r = mode.r_outer;
    let mut flux = C::new(0.0, 0.0);
    for &(w, wt) in &dirs {
        let (ep, hp) = field_in_layer(mode, w, Layer::Core)?;
        let (em, hm) = field_in_layer(mode, w, Layer::Shell)?;
        rep.core_normal_e = rep.core_normal_e.max(dot_real(w, &ep).norm());
        rep.core_h = rep.core_h.max(norm3(&hp));
        let diff = |a: &CVec3, b: &CVec3| -> CVec3 { std::array::from_fn(|i| a[i] - b[i]) };
        rep.tangential_e_jump = rep
            .tangential_e_jump
            .max(norm3(&cross_real(w, &diff(&ep, &em))));
        rep.tangential_h_jump = rep
            .tangential_h_jump
            .max(norm3(&cross_real(w, &diff(&hp, &hm))));
        rep.normal_h_jump = rep.normal_h_jump.max(dot_real(w, &diff(&hp, &hm)).norm());
        let (eo, _) = field_in_layer(mode, at(w, big_r), Layer::Shell)?;
        rep.outer_tangential_e = rep.outer_tangential_e.max(norm3(&cross_real(w, &eo)));
        flux += dot_real(w, &eo) * wt * big_r * big_r;
        for t in 1..=4 {
            let rs = 1.0 + (big_r - 1.0) * t as f64 / 4.0;
            let (_, hs) = field_in_layer(mode, at(w, rs), Layer::Shell)?;
            rep.shell_h_max = rep.shell_h_max.max(norm3(&hs));
            let (_, hc) = field_in_layer(mode, at(w, t as f64 / 4.0), Layer::Core)?;
            rep.core_h_max = rep.core_h_max.max(norm3(&hc));
        }
    }
    rep.outer_flux = flux.norm();
    Ok(rep)
}

/// `x,y,z,Re Ex,Im Ex,…,Im Hz` with a versioned comment line.
pub fn write_samples_csv(samples: &[FieldSample]) -> String {
    let mut s = String::from("# fields v1\nx,y,z");
    for f in ["E", "H"] {
        for c in ["x", "y", "z"] {
            let _ = write!(s, ",Re {f}{c},Im {f}{c}");
        }
    }
    s.push('\n');
    for p in samples {
        let _ = write!(
            s,
            "{:.16e},{:.16e},{:.16e}",
            p.point[0], p.point[1], p.point[2]
        );
        for z in p.e.iter().chain(&p.h) {
            let _ = write!(s, ",{:.16e},{:.16e}", z.re, z.im);
        }
        s.push('\n');
    }
    s
}
