use std::f64::consts::PI;

use enz_core::fem::*;
use enz_core::mesh2d::*;
use enz_core::Error;
use num_complex::Complex64;

fn disk(nc: usize, ns: usize) -> Mesh {
    generate_disk_in_disk(2.0, nc, ns).unwrap()
}

#[test]
fn stiffness_kernel_and_masses() {
    let mesh = disk(6, 6);
    let f = assemble(&mesh).unwrap();
    let n = f.dim();
    let one = vec![1.0; n];
    let a1 = f.a.mul_vec(&one);
    assert!(a1.iter().all(|x| x.abs() < 1e-12));
    assert!((f.m.form(&one, &one) - mesh.total_area()).abs() < 1e-12);
    let d_area = mesh.region_area(Region::Inclusion);
    assert!((f.m_d.form(&one, &one) - d_area).abs() < 1e-12);
    let sum = f.m_d.lin_comb(1.0, &f.m_s, 1.0).unwrap();
    assert_eq!(sum, f.m);
    f.a.check_symmetric(0.0).unwrap();
    f.m_d.check_symmetric(0.0).unwrap();

    // Row sums of M_D are a third of the adjacent inclusion area.
    let mut lumped = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if tri.region == Region::Inclusion {
            for &v in &tri.v {
                lumped[v] += mesh.triangle_area(t) / 3.0;
            }
        }
    }
    for (r, l) in f.m_d.mul_vec(&one).iter().zip(&lumped) {
        assert!((r - l).abs() < 1e-15);
    }
}

#[test]
fn stiffness_has_one_dimensional_kernel() {
    let mesh = disk(2, 2);
    let f = assemble(&mesh).unwrap();
    let vals = enz_core::linalg::sym_eig_generalized(&f.a.to_dense(), &f.m.to_dense())
        .unwrap()
        .values;
    assert!(vals[0].abs() < 1e-10);
    assert!(vals[1] > 1e-3);
}

#[test]
fn pencil_mass_is_linear_in_contrast() {
    let f = assemble(&disk(4, 4)).unwrap();
    let delta = Complex64::new(0.3, -0.7);
    let b = f.weighted_mass(CoefficientField::contrast(delta));
    let want = f
        .m_d
        .to_complex()
        .lin_comb(Complex64::new(1.0, 0.0), &f.m_s.to_complex(), delta)
        .unwrap();
    assert_eq!(b, want);
    let b1 = f.weighted_mass(CoefficientField::contrast(Complex64::new(1.0, 0.0)));
    assert_eq!(b1, f.m.to_complex());
}

#[test]
fn neumann_zero_flux_is_zero() {
    let mesh = disk(5, 3);
    let core = extract_submesh(&mesh, Region::Inclusion).unwrap();
    let s = solve_neumann(
        &core,
        &FluxData::EdgeFlux(vec![0.0; core.boundary_edges().len()]),
        None,
        1e-10,
    )
    .unwrap();
    assert!(s.h.values.iter().all(|&v| v == 0.0));
}

#[test]
fn neumann_recovers_linear_solution() {
    let mesh = disk(8, 3);
    let core = extract_submesh(&mesh, Region::Inclusion).unwrap();
    let flux = FluxData::from_normal_fn(&core, |_, nu| nu[0]);
    let s = solve_neumann(&core, &flux, None, 1e-10).unwrap();
    assert!(s.residual <= 1e-10);
    let (k, m) = (core.vertex_count(), core.vertices());
    // Mean of x₁ over the symmetric polygon is zero.
    for i in 0..k {
        assert!((s.h.values[i] - m[i][0]).abs() < 1e-10);
    }
}

#[test]
fn neumann_rejects_imbalance() {
    let mesh = disk(6, 3);
    let core = extract_submesh(&mesh, Region::Inclusion).unwrap();
    let perimeter: f64 = core
        .boundary_edges()
        .iter()
        .map(|&([a, b], _)| {
            let (p, q) = (core.vertices()[a], core.vertices()[b]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .sum();
    let flux = FluxData::from_normal_fn(&core, |_, nu| nu[0] + 0.1 / perimeter);
    match solve_neumann(&core, &flux, None, 1e-10) {
        Err(Error::Compatibility { imbalance, .. }) => assert!((imbalance - 0.1).abs() < 1e-12),
        r => panic!("expected compatibility error, got {r:?}"),
    }
}

#[test]
fn neumann_with_divergence_load() {
    // F = e₁ with zero flux of ∇h + F: h = −x₁.
    let mesh = disk(6, 3);
    let core = extract_submesh(&mesh, Region::Inclusion).unwrap();
    let field = vec![[1.0, 0.0]; core.triangle_count()];
    let zero = FluxData::EdgeFlux(vec![0.0; core.boundary_edges().len()]);
    let s = solve_neumann(&core, &zero, Some(&field), 1e-10).unwrap();
    for (h, p) in s.h.values.iter().zip(core.vertices()) {
        assert!((h + p[0]).abs() < 1e-10);
    }
}

#[test]
fn dirichlet_constant_data() {
    let mesh = disk(4, 4);
    let shell = extract_submesh(&mesh, Region::Shell).unwrap();
    let s = solve_dirichlet(
        &shell,
        &[
            (BoundaryTag::Interface, BoundaryValues::Constant(1.0)),
            (BoundaryTag::Outer, BoundaryValues::Constant(1.0)),
        ],
        None,
    )
    .unwrap();
    assert!(s.h.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn dirichlet_missing_role() {
    let mesh = disk(4, 4);
    let shell = extract_submesh(&mesh, Region::Shell).unwrap();
    match solve_dirichlet(
        &shell,
        &[(BoundaryTag::Interface, BoundaryValues::Constant(0.0))],
        None,
    ) {
        Err(Error::MissingRole(r)) => assert_eq!(r, "OUTER"),
        r => panic!("{r:?}"),
    }
}

#[test]
fn dirichlet_divergence_free_load_vanishes() {
    let mesh = disk(4, 4);
    let shell = extract_submesh(&mesh, Region::Shell).unwrap();
    let field = vec![[0.3, -1.2]; shell.triangle_count()];
    let s = solve_dirichlet(
        &shell,
        &[
            (BoundaryTag::Interface, BoundaryValues::Constant(0.0)),
            (BoundaryTag::Outer, BoundaryValues::Constant(0.0)),
        ],
        Some(&field),
    )
    .unwrap();
    assert!(s.h.values.iter().all(|v| v.abs() < 1e-12));
}

fn psi(nc: usize, ns: usize) -> (Submesh, Solution, f64) {
    let mesh = disk(nc, ns);
    let shell = extract_submesh(&mesh, Region::Shell).unwrap();
    let s = solve_dirichlet(
        &shell,
        &[
            (BoundaryTag::Interface, BoundaryValues::Constant(0.0)),
            (BoundaryTag::Outer, BoundaryValues::Constant(1.0)),
        ],
        None,
    )
    .unwrap();
    // L² error against ln r / ln 2 with the edge-midpoint rule.
    let exact = |p: Point| p[0].hypot(p[1]).ln() / 2f64.ln();
    let mut err = 0.0;
    for t in 0..shell.triangle_count() {
        let v = shell.triangle(t);
        let area = shell.triangle_area(t);
        for i in 0..3 {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            let (pa, pb) = (shell.vertices()[a], shell.vertices()[b]);
            let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            let uh = (s.h.values[a] + s.h.values[b]) / 2.0;
            err += area / 3.0 * (uh - exact(mid)).powi(2);
        }
    }
    (shell, s, err.sqrt())
}

#[test]
fn annulus_potential_converges_quadratically() {
    let (_, s, e1) = psi(4, 8);
    let (_, _, e2) = psi(8, 16);
    assert!(s.residual <= 1e-10);
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
}

#[test]
fn annulus_fluxes() {
    let (shell, s, _) = psi(16, 16);
    let h = &s.h.values;
    let outer = boundary_flux(&shell, h, None, BoundaryTag::Outer).unwrap();
    let inner = boundary_flux(&shell, h, None, BoundaryTag::Interface).unwrap();
    let oracle = 2.0 * PI / 2f64.ln();
    assert!((outer / oracle - 1.0).abs() < 0.01, "{outer}");
    assert!((outer + inner).abs() < 1e-10);
    assert!(h.iter().all(|&v| (-1e-14..=1.0 + 1e-14).contains(&v)));
    let c = vec![2.5; shell.vertex_count()];
    assert!(
        boundary_flux(&shell, &c, None, BoundaryTag::Outer)
            .unwrap()
            .abs()
            < 1e-12
    );
}

#[test]
fn galerkin_orthogonality() {
    let mesh = generate_square_with_disk(2.0, 5, 5).unwrap();
    let shell = extract_submesh(&mesh, Region::Shell).unwrap();
    let trace: Vec<f64> = shell
        .vertices()
        .iter()
        .map(|p| (3.0 * p[0]).sin() + p[1])
        .collect();
    let field: Vec<[f64; 2]> = (0..shell.triangle_count())
        .map(|t| [t as f64 % 3.0, 1.0])
        .collect();
    let solver = DirichletSolver::new(&shell).unwrap();
    let s = solver
        .solve(
            &[
                (BoundaryTag::Interface, BoundaryValues::Nodal(trace.clone())),
                (BoundaryTag::Outer, BoundaryValues::Constant(-1.0)),
            ],
            Some(&field),
        )
        .unwrap();
    for &i in &shell.role_nodes(BoundaryTag::Interface) {
        assert_eq!(s.h.values[i], trace[i]);
    }
    let kh = solver.stiffness().mul_vec(&s.h.values);
    let b = load_vector(&shell, &field, |_| true).unwrap();
    let mut constrained = vec![false; shell.vertex_count()];
    for r in shell.roles() {
        for i in shell.role_nodes(r) {
            constrained[i] = true;
        }
    }
    let test: Vec<f64> = (0..shell.vertex_count())
        .map(|i| {
            if constrained[i] {
                0.0
            } else {
                ((i * 7919) % 13) as f64 - 6.0
            }
        })
        .collect();
    let pairing: f64 = (0..test.len()).map(|i| test[i] * (kh[i] + b[i])).sum();
    assert!(pairing.abs() <= 1e-10, "{pairing}");
}

#[test]
fn norms_of_simple_functions() {
    let mesh = disk(6, 6);
    let f = assemble(&mesh).unwrap();
    let one = vec![1.0; f.dim()];
    let (l2, semi) = f.norms(&one, RegionSelector::Inclusion);
    assert!((l2 * l2 - mesh.region_area(Region::Inclusion)).abs() < 1e-12);
    assert!(semi < 1e-7);
    let x = interpolate(&mesh, |p| Complex64::new(0.0, p[0]));
    let (_, semi) = f.norms(&x.values, RegionSelector::All);
    assert!((semi * semi - mesh.total_area()).abs() < 1e-10);
    assert!(f.h1_norm(&one, RegionSelector::Shell) > 0.0);
}
