use std::f64::consts::PI;

use enz_core::specfun::*;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn j1_closed(x: f64) -> f64 {
    x.sin() / (x * x) - x.cos() / x
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// y_0..y_nmax by upward recurrence, which is stable for y.
fn y_upward(nmax: usize, x: f64) -> Vec<f64> {
    let mut y = vec![-x.cos() / x, -x.cos() / (x * x) - x.sin() / x];
    for k in 1..nmax {
        let next = (2 * k + 1) as f64 / x * y[k] - y[k - 1];
        y.push(next);
    }
    y
}

#[test]
fn j0_at_pi() {
    let (j, dj) = spherical_bessel(0, PI).unwrap();
    assert!(j.abs() < 1e-15);
    assert!((dj + 1.0 / PI).abs() < 1e-15);
}

#[test]
fn j1_small_argument() {
    for &x in &[1e-8, 1e-5, 1e-3] {
        let (j, _) = spherical_bessel(1, x).unwrap();
        assert!((j / x - 1.0 / 3.0).abs() < 1e-6);
    }
    assert_eq!(spherical_bessel_origin(1), (0.0, 1.0 / 3.0));
    assert!(spherical_bessel(1, 0.0).is_err());
    assert!(spherical_bessel(1, -1.0).is_err());
}

#[test]
fn zeros_of_j0_and_j1() {
    let z = bessel_zeros(0, 5).unwrap();
    for (m, k) in z.iter().enumerate() {
        assert!((k - (m + 1) as f64 * PI).abs() <= 1e-12, "{k}");
    }
    let oracle = bisect(j1_closed, 4.0, 5.0);
    let k1 = bessel_zeros(1, 1).unwrap()[0];
    assert!((k1 - oracle).abs() <= 1e-10);
    assert!((k1 - 4.493409457909064).abs() < 1e-12);
    assert!(k1 > PI && k1 < 2.0 * PI);
}

#[test]
fn zeros_interlace_and_vanish() {
    for n in 0..=10 {
        let a = bessel_zeros(n, 6).unwrap();
        let b = bessel_zeros(n + 1, 5).unwrap();
        for w in a.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, z) in b.iter().enumerate() {
            assert!(a[i] < *z && *z < a[i + 1], "n={n} i={i}");
        }
        for z in &a {
            assert!(spherical_bessel(n, *z).unwrap().0.abs() <= 1e-12);
        }
    }
}

#[test]
fn spherical_cross_product_identity() {
    // j_n y_{n-1} − j_{n-1} y_n = 1/x²
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let x: f64 = rng.gen_range(0.05..100.0);
        let n: usize = rng.gen_range(1..=30);
        let j = spherical_bessel_array(n, x).unwrap();
        let y = y_upward(n, x);
        let w = (j[n] * y[n - 1] - j[n - 1] * y[n]) * x * x;
        // error amplification by |j y| on each term
        let scale = (j[n] * y[n - 1]).abs().max((j[n - 1] * y[n]).abs()) * x * x;
        assert!(
            (w - 1.0).abs() <= 1e-12 * scale.max(1.0),
            "n={n} x={x} w={w}"
        );
    }
}

#[test]
fn spherical_matches_series_and_ode() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(0.1..60.0);
        let n: usize = rng.gen_range(0..=20);
        let (j, dj, d2) = spherical_bessel_d2(n, x).unwrap();
        let nf = n as f64;
        let res = d2 + 2.0 / x * dj + (1.0 - nf * (nf + 1.0) / (x * x)) * j;
        let scale = j.abs() + dj.abs() + d2.abs();
        assert!(
            res.abs() <= 1e-10 * scale.max(1e-300),
            "n={n} x={x} res={res}"
        );
    }
}

#[test]
fn spherical_closed_forms() {
    for &x in &[2.5, 4.0, 9.0, 55.0] {
        let j = spherical_bessel_array(3, x).unwrap();
        let (s, c) = (x.sin(), x.cos());
        let j3 = (15.0 / x.powi(4) - 6.0 / (x * x)) * s - (15.0 / x.powi(3) - 1.0 / x) * c;
        assert!(
            (j[3] - j3).abs() <= 1e-12 * j3.abs().max(1e-3),
            "x={x} {} {j3}",
            j[3]
        );
    }
}

fn j_integral(m: usize, x: f64) -> f64 {
    let n = 512;
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            (m as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn cylinder_against_bessel_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(0.0..100.0);
        let m: usize = rng.gen_range(0..=20);
        let (j, _) = cylinder_bessel(m, x).unwrap();
        let o = j_integral(m, x);
        assert!((j - o).abs() <= 2e-13, "m={m} x={x} {j} {o}");
    }
    assert_eq!(cylinder_bessel(0, 0.0).unwrap(), (1.0, 0.0));
}

#[test]
fn cylinder_derivative_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let x: f64 = rng.gen_range(0.0..50.0);
        let (_, d0) = cylinder_bessel(0, x).unwrap();
        let (j1, _) = cylinder_bessel(1, x).unwrap();
        assert!((d0 + j1).abs() <= 1e-12);
    }
}

fn j1_series(x: f64) -> f64 {
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..60 {
        term *= -(x * x / 4.0) / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}

#[test]
fn cylinder_zeros() {
    let z = cylinder_bessel_zeros(1, 1, false).unwrap()[0];
    let oracle = bisect(j1_series, 3.0, 4.5);
    assert!((z - oracle).abs() < 1e-12);
    assert!((z - 3.831705970207512).abs() < 1e-12);
    let dz = cylinder_bessel_zeros(1, 1, true).unwrap()[0];
    assert!((dz - 1.8411837813406593).abs() < 1e-11);
}

fn sphere_quadrature(f: impl Fn(SurfacePoint) -> f64) -> f64 {
    let (x, w) = gauss_legendre(40);
    let nphi = 40;
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.acos();
        for k in 0..nphi {
            let phi = 2.0 * PI * k as f64 / nphi as f64;
            s += wi * (2.0 * PI / nphi as f64) * f(SurfacePoint::new(theta, phi).unwrap());
        }
    }
    s
}

fn all_indices(nmax: usize, nmin: usize) -> Vec<HarmonicIndex> {
    let mut v = Vec::new();
    for n in nmin..=nmax {
        for m in -(n as i32)..=(n as i32) {
            v.push(HarmonicIndex::new(n, m).unwrap());
        }
    }
    v
}

#[test]
fn constant_harmonic() {
    let p = SurfacePoint::new(0.3, 1.2).unwrap();
    let (y, g) = real_spherical_harmonic(HarmonicIndex::new(0, 0).unwrap(), p);
    assert!((y - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    assert_eq!(g, [0.0, 0.0, 0.0]);
    assert!(HarmonicIndex::new(1, 2).is_err());
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(10);
    for p in 0..20 {
        let s: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(p)).sum();
        let exact = if p % 2 == 1 {
            0.0
        } else {
            2.0 / (p + 1) as f64
        };
        assert!((s - exact).abs() < 1e-14);
    }
}

#[test]
fn harmonic_orthonormality_to_degree_8() {
    let idx = all_indices(8, 0);
    let pts: Vec<SurfacePoint> = {
        let (x, _) = gauss_legendre(40);
        let mut v = Vec::new();
        for xi in &x {
            for k in 0..40 {
                v.push(SurfacePoint::new(xi.acos(), 2.0 * PI * k as f64 / 40.0).unwrap());
            }
        }
        v
    };
    let (_, w) = gauss_legendre(40);
    let weights: Vec<f64> = w
        .iter()
        .flat_map(|wi| std::iter::repeat(wi * 2.0 * PI / 40.0).take(40))
        .collect();
    let vals: Vec<Vec<(f64, Vec3)>> = idx
        .iter()
        .map(|&i| pts.iter().map(|&p| real_spherical_harmonic(i, p)).collect())
        .collect();
    for a in 0..idx.len() {
        for b in a..idx.len() {
            let s: f64 = (0..pts.len())
                .map(|k| weights[k] * vals[a][k].0 * vals[b][k].0)
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((s - want).abs() <= 1e-8, "{:?} {:?} {s}", idx[a], idx[b]);
        }
        let n = idx[a].n as f64;
        let g: f64 = (0..pts.len())
            .map(|k| weights[k] * dot(vals[a][k].1, vals[a][k].1))
            .sum();
        assert!((g - n * (n + 1.0)).abs() <= 1e-8, "{:?} {g}", idx[a]);
    }
}

#[test]
fn gradient_tangent_and_pole_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in all_indices(8, 0) {
        for _ in 0..20 {
            let p =
                SurfacePoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI)).unwrap();
            let (_, g) = real_spherical_harmonic(i, p);
            assert!(dot(g, p.omega()).abs() <= 1e-12);
        }
        // the gradient at a pole cannot depend on φ
        for theta in [0.0, PI] {
            let g0 = real_spherical_harmonic(i, SurfacePoint::new(theta, 0.0).unwrap()).1;
            let g1 = real_spherical_harmonic(i, SurfacePoint::new(theta, 2.1).unwrap()).1;
            for c in 0..3 {
                assert!((g0[c] - g1[c]).abs() < 1e-12);
                assert!(g0[c].is_finite());
            }
        }
        // continuity of the gradient approaching the pole
        let gp = real_spherical_harmonic(i, SurfacePoint::new(0.0, 0.7).unwrap()).1;
        let gn = real_spherical_harmonic(i, SurfacePoint::new(1e-7, 0.7).unwrap()).1;
        for c in 0..3 {
            assert!((gp[c] - gn[c]).abs() < 1e-5 * (1.0 + gp[c].abs()));
        }
    }
}

#[test]
fn vector_harmonic_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8usize);
        let m = rng.gen_range(-(n as i32)..=(n as i32));
        let i = HarmonicIndex::new(n, m).unwrap();
        let p = SurfacePoint::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI)).unwrap();
        let (u, v) = vector_harmonics(i, p).unwrap();
        let w = p.omega();
        assert!(dot(u, w).abs() <= 1e-12 && dot(v, w).abs() <= 1e-12);
        assert!(dot(u, v).abs() <= 1e-12);
    }
    assert!(vector_harmonics(
        HarmonicIndex::new(0, 0).unwrap(),
        SurfacePoint::new(1.0, 1.0).unwrap()
    )
    .is_err());
}

#[test]
fn vector_harmonic_orthonormality() {
    let idx = all_indices(8, 1);
    // pairs within and across degrees
    for &a in &idx {
        for &b in idx.iter().filter(|b| b.n + 1 >= a.n && b.n <= a.n + 1) {
            let uu = sphere_quadrature(|p| {
                let (ua, _) = vector_harmonics(a, p).unwrap();
                let (ub, _) = vector_harmonics(b, p).unwrap();
                dot(ua, ub)
            });
            let vv = sphere_quadrature(|p| {
                let (_, va) = vector_harmonics(a, p).unwrap();
                let (_, vb) = vector_harmonics(b, p).unwrap();
                dot(va, vb)
            });
            let uv = sphere_quadrature(|p| {
                let (ua, _) = vector_harmonics(a, p).unwrap();
                let (_, vb) = vector_harmonics(b, p).unwrap();
                dot(ua, vb)
            });
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((uu - want).abs() <= 1e-8, "{a:?} {b:?} {uu}");
            assert!((vv - want).abs() <= 1e-8);
            assert!(uv.abs() <= 1e-8);
        }
    }
}

#[test]
fn scaled_bessel_matches_real_functions() {
    for n in 1..=6 {
        for &x in &[0.01, 0.4, 2.0, 7.5, 20.0] {
            let s = scaled_bessel(n, C::new(x, 0.0));
            let j = spherical_bessel_array(n, x).unwrap();
            let y = y_upward(n, x);
            let e_n = j[n] / x.powi(n as i32);
            let e_m = j[n - 1] / x.powi(n as i32 - 1);
            assert!(
                (s.e[1].re - e_n).abs() <= 1e-11 * e_n.abs().max(1e-300),
                "n={n} x={x}"
            );
            assert!((s.e[0].re - e_m).abs() <= 1e-11 * e_m.abs().max(1e-300));
            let g_n = y[n] * x.powi(n as i32 + 1);
            assert!((s.g[1].re - g_n).abs() <= 1e-11 * g_n.abs());
        }
    }
}

#[test]
fn scaled_bessel_is_even() {
    let z = C::new(1.3, 2.1);
    for n in 1..=4 {
        let a = scaled_bessel(n, z);
        let b = scaled_bessel(n, -z);
        for k in 0..2 {
            assert!((a.e[k] - b.e[k]).norm() < 1e-12 * a.e[k].norm());
            assert!((a.g[k] - b.g[k]).norm() < 1e-12 * a.g[k].norm());
        }
    }
}

proptest::proptest! {
    #[test]
    fn bessel_three_term_recurrence(n in 1usize..12, x in 0.05f64..40.0) {
        let j = spherical_bessel_array(n + 1, x).unwrap();
        let lhs = j[n - 1] + j[n + 1];
        let rhs = (2 * n + 1) as f64 / x * j[n];
        let scale = j[n - 1].abs().max(j[n + 1].abs()).max(1e-300);
        proptest::prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(rhs.abs()));
    }
}
