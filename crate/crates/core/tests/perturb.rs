use enz_core::eig::*;
use enz_core::fem::assemble;
use enz_core::mesh2d::generate_disk_in_disk;
use enz_core::perturb::*;
use enz_core::Error;
use num_complex::Complex64 as C;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[test]
fn polynomial_branch_is_exact() {
    let s = CircleSamples::from_fn(0.1, 32, |d| 3.0 + 2.0 * d + d * d).unwrap();
    let a = taylor_from_circle(&s, 8, CLOSURE_TOL).unwrap();
    let want = [3.0, 2.0, 1.0];
    for (k, ak) in a.iter().enumerate() {
        let w = want.get(k).copied().unwrap_or(0.0);
        // Rounding in the samples is amplified by r^-k.
        let err = (ak - w).norm();
        assert!(
            err <= 1e-12 || (k > 3 && err * 0.1f64.powi(k as i32) <= 1e-15),
            "a_{k} = {ak}"
        );
    }
    let rep = analyticity_report(
        &s,
        8,
        &[(
            C::new(0.03, -0.02),
            3.0 + 2.0 * C::new(0.03, -0.02) + C::new(0.03, -0.02).powi(2),
        )],
        &[c(3.0)],
    )
    .unwrap();
    assert!(rep.prediction_errors[0] <= 1e-14);
    assert_eq!(rep.reality_defect, 0.0);
}

#[test]
fn geometric_branch() {
    let s = CircleSamples::from_fn(0.1, 32, |d| 1.0 / (1.0 - 2.0 * d)).unwrap();
    let a = taylor_from_circle(&s, 8, CLOSURE_TOL).unwrap();
    for (k, ak) in a.iter().enumerate() {
        let w = 2f64.powi(k as i32);
        assert!((ak - w).norm() <= 1e-9 * w, "a_{k} = {ak}");
    }
    let rep = analyticity_report(&s, 8, &[], &[]).unwrap();
    for r in &rep.decay_ratios {
        assert!((r - 0.2).abs() < 1e-8);
    }
}

#[test]
fn order_and_size_guards() {
    let s = CircleSamples::from_fn(0.1, 16, |d| d).unwrap();
    assert!(matches!(
        taylor_from_circle(&s, 5, CLOSURE_TOL),
        Err(Error::Invalid(_))
    ));
    assert!(CircleSamples::new(0.1, vec![c(1.0); 13]).is_err());
    assert!(CircleSamples::new(0.0, vec![c(1.0); 17]).is_err());
}

#[test]
fn report_json_keys() {
    let s = CircleSamples::from_fn(0.05, 32, |d| 2.0 - d).unwrap();
    let rep = analyticity_report(&s, 8, &[(c(0.025), c(1.975))], &[c(2.0)]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "a_coeffs",
            "closure_defect",
            "decay_ratios",
            "prediction_errors",
            "reality_defect"
        ]
    );
    let back: AnalyticityReport = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn braid_branches_do_not_close_but_power_sums_do() {
    let n = 32;
    let r: f64 = 0.1;
    let sets: Vec<Vec<C>> = (0..=n)
        .map(|j| {
            // √δ continued along the circle, so one loop swaps the roots
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let sq = C::from_polar(r.sqrt(), ang / 2.0);
            vec![1.0 + sq, 1.0 - sq]
        })
        .collect();
    let branches = match_by_continuity(&sets).unwrap();
    for b in &branches {
        let s = CircleSamples::new(r, b.clone()).unwrap();
        assert!(matches!(
            taylor_from_circle(&s, 4, CLOSURE_TOL),
            Err(Error::NotClosed { .. })
        ));
    }
    let sums: Vec<CircleSamples> = (1..=2)
        .map(|p| {
            CircleSamples::new(
                r,
                sets.iter()
                    .map(|s| s.iter().map(|l| l.powi(p)).sum())
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    let cs = cluster_series(&sums, 8, CLOSURE_TOL).unwrap();
    assert!(cs.closure_defects.iter().all(|&d| d <= 1e-12));
    let want = [vec![2.0], vec![2.0, 2.0]];
    for (p, coeffs) in cs.coeffs.iter().enumerate() {
        for (k, a) in coeffs.iter().enumerate() {
            let w = want[p].get(k).copied().unwrap_or(0.0);
            assert!(
                (a - w).norm() * r.powi(k as i32) <= 1e-15,
                "s_{} a_{k} = {a}",
                p + 1
            );
            if k <= 2 {
                assert!((a - w).norm() <= 1e-12);
            }
        }
    }
    let eig = cs.eigenvalues_at(c(0.04)).unwrap();
    assert!((eig[0] - 0.8).norm() < 1e-12 && (eig[1] - 1.2).norm() < 1e-12);
}

#[test]
fn power_sums_invert() {
    let roots = [C::new(1.0, 2.0), c(-3.0), C::new(0.5, -0.25)];
    let s: Vec<C> = (1..=3)
        .map(|p| roots.iter().map(|r| r.powi(p)).sum())
        .collect();
    let got = eigenvalues_from_power_sums(&s).unwrap();
    for r in roots {
        assert!(got.iter().any(|g| (g - r).norm() < 1e-12));
    }
}

#[test]
fn tracked_invariant_branch_series() {
    let mesh = generate_disk_in_disk(2.0, 6, 6).unwrap();
    let f = assemble(&mesh).unwrap();
    let lim = limit_spectrum(&f, 6).unwrap();
    let l0 = lim
        .pairs
        .iter()
        .find(|p| interface_variation(&f, &p.vector) < 1e-2)
        .unwrap()
        .lambda
        .re;
    let (path, start) = circle_path(0.05, 32, 2);
    let opts = TrackOptions::default();
    let b = track_branch(&f, l0, &path, &opts).unwrap();
    let s = CircleSamples::from_branch(&b, start).unwrap();
    assert!(s.closure_defect() <= 1e-9);

    let held = c(0.025);
    let direct = track_branch(&f, l0, &[c(0.0), c(0.0125), held], &opts).unwrap();
    let lam = direct.steps[2].lambda;
    let real: Vec<C> = [0.02, 0.05, 0.1]
        .iter()
        .map(|&d| delta_spectrum(&f, c(d), c(l0), 1).unwrap().pairs[0].lambda)
        .collect();
    let rep = analyticity_report(&s, 8, &[(held, lam)], &real).unwrap();
    let a0 = rep.a_coeffs[0];
    assert!((a0[0] - l0).abs() <= 1e-7 * l0 && a0[1].abs() <= 1e-7 * l0);
    let a1 = rep.a_coeffs[1];
    assert!(a1[0] < 0.0 && a1[1].abs() < 1e-8 * a1[0].abs());
    assert!(
        rep.prediction_errors[0] <= 1e-6,
        "{:?}",
        rep.prediction_errors
    );
    assert!(rep.reality_defect <= 1e-9);

    // h = 1 cluster reduces to the single-branch series.
    let ct = cluster_track(&f, l0, &path, &opts).unwrap();
    assert_eq!(ct.multiplicity, 1);
    let ps = power_sum_samples(&ct, start).unwrap();
    let cs = cluster_series(&ps, 8, CLOSURE_TOL).unwrap();
    for (a, b) in cs.coeffs[0].iter().zip(&rep.a_coeffs) {
        assert!((a - C::new(b[0], b[1])).norm() <= 1e-9 * l0);
    }
}
