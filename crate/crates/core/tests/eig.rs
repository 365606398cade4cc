use enz_core::eig::*;
use enz_core::fem::*;
use enz_core::linalg::{general_eig, DenseMatrix, LuFactors};
use enz_core::mesh2d::*;
use enz_core::specfun::{cylinder_bessel, cylinder_bessel_zeros};
use enz_core::Error;
use num_complex::Complex64 as C;

fn forms(mesh: &Mesh) -> AssembledForms {
    assemble(mesh).unwrap()
}

fn radial(f: &AssembledForms, s: &Spectrum) -> f64 {
    s.pairs
        .iter()
        .find(|p| interface_variation(f, &p.vector) < 1e-2)
        .expect("no radial mode among the computed pairs")
        .lambda
        .re
}

#[test]
fn radial_limit_eigenvalue_is_shell_invariant() {
    let oracle = cylinder_bessel_zeros(1, 1, false).unwrap()[0].powi(2);
    assert!((oracle - 14.6819706).abs() < 1e-6);
    for mesh in [
        generate_disk_in_disk(2.0, 16, 16).unwrap(),
        generate_square_with_disk(2.0, 16, 16).unwrap(),
    ] {
        let f = forms(&mesh);
        let s = limit_spectrum(&f, 6).unwrap();
        let lam = radial(&f, &s);
        assert!((lam / oracle - 1.0).abs() < 0.01, "{lam}");
        let one = vec![C::new(1.0, 0.0); f.dim()];
        let md = f.m_d.to_complex();
        for (k, p) in s.pairs.iter().enumerate() {
            assert!(p.lambda.re > 0.0 && p.lambda.im == 0.0);
            assert!(p.residual <= 1e-8);
            assert!(md.form(&one, &p.vector).norm() <= 1e-8);
            for (l, q) in s.pairs.iter().enumerate() {
                let g = md.form(&p.vector, &q.vector);
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((g - want).norm() <= 1e-8);
            }
        }
        assert!(s.pairs.windows(2).all(|w| w[0].lambda.re <= w[1].lambda.re));
    }
}

/// Root of x J₁'(x)/J₁(x) = −(R²−1)/(R²+1) above the first zero of J₁'.
fn m1_oracle(r: f64) -> f64 {
    let target = -(r * r - 1.0) / (r * r + 1.0);
    let g = |x: f64| {
        let (j, dj) = cylinder_bessel(1, x).unwrap();
        x * dj - target * j
    };
    let (mut a, mut b) = (1.9, 3.8);
    assert!(g(a) * g(b) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(a) * g(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    (0.5 * (a + b)).powi(2)
}

#[test]
fn first_angular_mode_matches_shooting_oracle() {
    let f = forms(&generate_disk_in_disk(2.0, 16, 16).unwrap());
    let s = limit_spectrum(&f, 2).unwrap();
    let oracle = m1_oracle(2.0);
    for p in &s.pairs {
        assert!(
            (p.lambda.re / oracle - 1.0).abs() < 0.01,
            "{} vs {oracle}",
            p.lambda
        );
    }
}

#[test]
fn unit_contrast_gives_neumann_disk() {
    let f = forms(&generate_disk_in_disk(2.0, 12, 12).unwrap());
    let s = delta_spectrum(&f, C::new(1.0, 0.0), C::new(0.5, 0.0), 3).unwrap();
    let oracle = (cylinder_bessel_zeros(1, 1, true).unwrap()[0] / 2.0).powi(2);
    assert!((oracle - 0.847489).abs() < 1e-6);
    let nearest = s.pairs[0].lambda;
    assert!((nearest.re / oracle - 1.0).abs() < 0.01, "{nearest}");
    assert!(s.warnings.is_empty() == (1.0 < validity_radius(&f)));
}

#[test]
fn zero_contrast_matches_limit_spectrum() {
    let f = forms(&generate_disk_in_disk(2.0, 6, 6).unwrap());
    let lim = limit_spectrum(&f, 5).unwrap();
    let d = delta_spectrum(&f, C::new(0.0, 0.0), C::new(-1.0, 0.0), 5).unwrap();
    let mut dl: Vec<f64> = d.pairs.iter().map(|p| p.lambda.re).collect();
    dl.sort_by(f64::total_cmp);
    for (a, b) in lim.pairs.iter().zip(&dl) {
        assert!((a.lambda.re - b).abs() <= 1e-9 * b);
    }
}

/// Eigenvalues of B⁻¹A from a dense factorization.
fn dense_oracle(f: &AssembledForms, delta: C) -> Vec<C> {
    let b = f
        .weighted_mass(CoefficientField::contrast(delta))
        .to_dense();
    let a = f.a.to_complex().to_dense();
    let lu = LuFactors::factor(&b).unwrap();
    let n = f.dim();
    let mut binv_a = DenseMatrix::<C>::zeros(n, n);
    for j in 0..n {
        binv_a.set_column(j, &lu.solve(&a.column(j)));
    }
    general_eig(&binv_a).unwrap().0
}

#[test]
fn complex_contrast_against_dense_oracle() {
    let f = forms(&generate_disk_in_disk(2.0, 4, 4).unwrap());
    let delta = C::new(0.05, 0.05);
    let lim = limit_spectrum(&f, 6).unwrap();
    let lam0 = radial(&f, &lim);
    let s = delta_spectrum(&f, delta, C::new(lam0, 0.0), 4).unwrap();
    let oracle = dense_oracle(&f, delta);
    for p in &s.pairs {
        assert!(p.residual <= 1e-8);
        let best = oracle
            .iter()
            .map(|o| (o - p.lambda).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-8 * p.lambda.norm(), "{} off by {best}", p.lambda);
    }
    assert!(s.pairs[0].lambda.im.abs() > 1e-6);
    let b = f.weighted_mass(CoefficientField::contrast(delta));
    assert!(bilinear_orthonormality_defect(&b, &s.pairs) <= 1e-8);
}

#[test]
fn real_contrast_is_real() {
    let f = forms(&generate_disk_in_disk(2.0, 6, 6).unwrap());
    for d in [0.02, 0.05, 0.1, 1.0] {
        let s = delta_spectrum(&f, C::new(d, 0.0), C::new(10.0, 0.0), 6).unwrap();
        for p in &s.pairs {
            assert!(p.lambda.im.abs() <= 1e-9 * (1.0 + p.lambda.norm()));
        }
    }
}

#[test]
fn warns_outside_validity_disk() {
    let f = forms(&generate_disk_in_disk(2.0, 4, 4).unwrap());
    let r = validity_radius(&f);
    assert!((r - 1.0 / 3.0).abs() < 0.05);
    let s = delta_spectrum(&f, C::new(0.0, 0.5), C::new(10.0, 0.0), 2).unwrap();
    assert_eq!(s.warnings.len(), 1);
    let s = delta_spectrum(&f, C::new(0.0, 0.1), C::new(10.0, 0.0), 2).unwrap();
    assert!(s.warnings.is_empty());
}

#[test]
fn k0_reciprocals_match_limit_spectrum() {
    let f = forms(&generate_disk_in_disk(2.0, 4, 4).unwrap());
    let k0 = discrete_k0(&f).unwrap();
    assert!(k0.min_eigenvalue() >= -1e-10);
    let lim = limit_spectrum(&f, 8).unwrap();
    for (p, rho) in lim.pairs.iter().zip(&k0.rho) {
        let l = p.lambda.re;
        assert!((1.0 / rho - l).abs() <= 1e-7 * l, "{} vs {l}", 1.0 / rho);
    }
    let n_d = f.inclusion_nodes.len();
    assert_eq!(k0.rho.len(), n_d - 1);
}

/// Rank by modified Gram-Schmidt on the columns.
fn rank(m: &DenseMatrix<f64>, tol: f64) -> usize {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let scale = m.max_abs();
    for j in 0..m.ncols() {
        let mut c = m.column(j);
        for _ in 0..2 {
            for q in &kept {
                let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                for (ci, qi) in c.iter_mut().zip(q) {
                    *ci -= d * qi;
                }
            }
        }
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > tol * scale {
            kept.push(c.iter().map(|x| x / nrm).collect());
        }
    }
    kept.len()
}

#[test]
fn k0_kernel_counts_fields_constant_on_inclusion() {
    let mesh = generate_disk_in_disk(1.5, 2, 2).unwrap();
    let f = forms(&mesh);
    let k0 = discrete_k0(&f).unwrap();
    let n = f.dim();
    let n_d = f.inclusion_nodes.len();
    // Mean-zero fields that are constant on D: one free value per outside
    // node plus the constant on D, minus the mean condition.
    let expected = (n - n_d) + 1 - 1;
    assert_eq!(k0.kernel_dim, expected);
    assert_eq!(n - 1 - rank(&k0.matrix, 1e-9), expected);
}

#[test]
fn k0_refuses_large_meshes() {
    let f = forms(&generate_disk_in_disk(2.0, 16, 16).unwrap());
    assert!(matches!(discrete_k0(&f), Err(Error::SizeLimit { .. })));
}

fn coarse() -> (AssembledForms, f64) {
    let f = forms(&generate_disk_in_disk(2.0, 6, 6).unwrap());
    let lim = limit_spectrum(&f, 6).unwrap();
    let l = radial(&f, &lim);
    (f, l)
}

#[test]
fn constant_path_gives_constant_branch() {
    let (f, l) = coarse();
    let zero = C::new(0.0, 0.0);
    let b = track_branch(&f, l, &[zero, zero, zero], &TrackOptions::default()).unwrap();
    for s in &b.steps {
        assert!((s.lambda - l).norm() <= 1e-9 * l);
    }
}

#[test]
fn real_path_is_monotone_and_real() {
    let (f, l) = coarse();
    let path: Vec<C> = (0..=10).map(|k| C::new(0.01 * k as f64, 0.0)).collect();
    let b = track_branch(&f, l, &path, &TrackOptions::default()).unwrap();
    let re: Vec<f64> = b.lambdas().iter().map(|z| z.re).collect();
    assert!(re.windows(2).all(|w| w[1] < w[0]) || re.windows(2).all(|w| w[1] > w[0]));
    for z in b.lambdas() {
        assert!(z.im.abs() <= 1e-9 * (1.0 + z.norm()));
    }
}

#[test]
fn circle_path_closes() {
    let (f, l) = coarse();
    let (path, start) = circle_path(0.1, 16, 4);
    let b = track_branch(&f, l, &path, &TrackOptions::default()).unwrap();
    let lam = b.lambdas();
    let (first, last) = (lam[start], lam[lam.len() - 1]);
    assert!((first - last).norm() <= 1e-9 * first.norm().max(1.0));
    for s in &b.steps {
        assert!(s.residual <= 1e-8);
    }
}

#[test]
fn degenerate_pair_needs_cluster_tracking() {
    let (f, _) = coarse();
    let lim = limit_spectrum(&f, 2).unwrap();
    let l = lim.pairs[0].lambda.re;
    assert!((lim.pairs[1].lambda.re - l).abs() < 1e-9 * l);
    let (path, start) = circle_path(0.05, 8, 2);
    assert!(matches!(
        track_branch(&f, l, &path, &TrackOptions::default()),
        Err(Error::Ambiguous { .. })
    ));
    let c = cluster_track(&f, l, &path, &TrackOptions::default()).unwrap();
    assert_eq!(c.multiplicity, 2);
    assert!(c.gap > 1.0);
    for p in 1..=2 {
        let s = c.power_sum(p);
        let (a, b) = (s[start], s[s.len() - 1]);
        assert!((a - b).norm() <= 1e-8 * a.norm().max(1.0));
    }
}
