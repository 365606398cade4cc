use std::collections::BTreeSet;
use std::f64::consts::PI;

use enz_core::mesh2d::*;
use enz_core::Error;

fn inclusion_area_error(nc: usize) -> f64 {
    let m = generate_disk_in_disk(2.0, nc, nc).unwrap();
    (m.region_area(Region::Inclusion) - PI).abs()
}

#[test]
fn disk_in_disk_area_is_second_order() {
    let e8 = inclusion_area_error(8);
    let e16 = inclusion_area_error(16);
    assert!(e8 < 0.05 && e8 > 0.0, "e8 = {e8}");
    let ratio = e8 / e16;
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn interface_vertices_on_unit_circle() {
    let m = generate_disk_in_disk(2.0, 8, 8).unwrap();
    let mut n = 0;
    for e in m.interface_edges() {
        for &v in &e.v {
            let p = m.vertices()[v];
            assert!((p[0].hypot(p[1]) - 1.0).abs() <= 1e-14);
        }
        n += 1;
    }
    assert_eq!(n, 48);
    for e in m.outer_edges() {
        for &v in &e.v {
            let p = m.vertices()[v];
            assert!((p[0].hypot(p[1]) - 2.0).abs() <= 1e-14);
        }
    }
}

#[test]
fn square_with_disk_geometry() {
    let m = generate_square_with_disk(2.0, 8, 8).unwrap();
    for t in 0..m.triangle_count() {
        assert!(m.triangle_area(t) > 0.0);
    }
    for e in m.outer_edges() {
        for &v in &e.v {
            let p = m.vertices()[v];
            assert!((p[0].abs().max(p[1].abs()) - 2.0).abs() <= 1e-14);
        }
    }
    let mut prev = f64::INFINITY;
    for nc in [4, 8, 16] {
        let m = generate_square_with_disk(2.0, nc, nc).unwrap();
        let err = (m.region_area(Region::Shell) - (16.0 - PI)).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 5e-3);
}

#[test]
fn generators_reject_bad_input() {
    assert!(matches!(
        generate_disk_in_disk(1.0, 8, 8),
        Err(Error::Invalid(_))
    ));
    assert!(matches!(
        generate_disk_in_disk(0.5, 8, 8),
        Err(Error::Invalid(_))
    ));
    assert!(matches!(
        generate_disk_in_disk(2.0, 1, 8),
        Err(Error::Invalid(_))
    ));
    assert!(matches!(
        generate_square_with_disk(1.0, 8, 8),
        Err(Error::Invalid(_))
    ));
}

#[test]
fn area_sum_matches_polygon() {
    let m = generate_disk_in_disk(2.0, 6, 5).unwrap();
    // Outer polygon is a regular 36-gon of radius 2.
    let n = 36.0;
    let poly = 0.5 * n * 4.0 * (2.0 * PI / n).sin();
    assert!((m.total_area() - poly).abs() <= 1e-12 * poly);
}

fn euler(tris: &[[usize; 3]]) -> i64 {
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for t in tris {
        for i in 0..3 {
            verts.insert(t[i]);
            let (a, b) = (t[i], t[(i + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    verts.len() as i64 - edges.len() as i64 + tris.len() as i64
}

#[test]
fn euler_characteristic_per_region() {
    for m in [
        generate_disk_in_disk(2.0, 5, 4).unwrap(),
        generate_square_with_disk(3.0, 4, 6).unwrap(),
    ] {
        let pick = |r: Region| -> Vec<[usize; 3]> {
            m.triangles()
                .iter()
                .filter(|t| t.region == r)
                .map(|t| t.v)
                .collect()
        };
        assert_eq!(euler(&pick(Region::Inclusion)), 1);
        assert_eq!(euler(&pick(Region::Shell)), 0);
        let all: Vec<[usize; 3]> = m.triangles().iter().map(|t| t.v).collect();
        assert_eq!(euler(&all), 1);
    }
}

#[test]
fn interface_edges_separate_regions() {
    let m = generate_square_with_disk(2.0, 6, 6).unwrap();
    let map = m.edge_map();
    for e in m.interface_edges() {
        let (a, b) = (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]));
        let ts = &map[&(a, b)];
        assert_eq!(ts.len(), 2);
        let regions: BTreeSet<Region> = ts.iter().map(|&t| m.triangles()[t].region).collect();
        assert_eq!(regions.len(), 2);
    }
}

#[test]
fn round_trip_is_exact() {
    let m = generate_disk_in_disk(2.0, 5, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    save_mesh(&m, &path).unwrap();
    let back = load_mesh(&path).unwrap();
    assert_eq!(back.vertices(), m.vertices());
    assert_eq!(back.triangles(), m.triangles());
    assert_eq!(back.boundary_edges(), m.boundary_edges());
    assert_eq!(write_mesh(&back), write_mesh(&m));
}

// Square [0,2]x[0,1] with the inclusion the left unit square and a
// midpoint inserted on the right square's left edge only.
const HANGING: &str = "enzmesh 1 2
vertices 7
0 0
1 0
1 1
0 1
2 0
2 1
1 0.5
triangles 5
0 1 2 0
0 2 3 0
1 4 6 1
4 5 6 1
6 5 2 1
boundary 7
0 1 1
1 4 1
4 5 1
5 2 1
2 3 1
3 0 1
1 2 0
";

#[test]
fn hanging_node_is_named() {
    let err = parse_mesh(HANGING, "fixture").unwrap_err();
    match err {
        Error::MeshValidation(msg) => {
            assert!(msg.contains("hanging"), "{msg}");
            assert!(msg.contains('1') && msg.contains('2'), "{msg}");
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn unknown_region_tag_is_parse_error() {
    let text = "enzmesh 1 2\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2 7\nboundary 0\n";
    match parse_mesh(text, "fixture").unwrap_err() {
        Error::Parse { line, msg, .. } => {
            assert_eq!(line, 7);
            assert!(msg.contains("region"), "{msg}");
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn malformed_files_report_lines() {
    let bad = [
        ("enzmesh 1 3\n", 1),
        ("enzmesh 1 2\nvertices 2\n0 0\n1\n", 4),
        ("enzmesh 1 2\nvertices 1\n0 x\n", 3),
        ("enzmesh 1 2\nvertices 1\n0 0\ntriangles 1\n0 1 2 0\n", 5),
    ];
    for (text, want) in bad {
        match parse_mesh(text, "f").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, want, "{text:?}"),
            e => panic!("unexpected {e:?}"),
        }
    }
}

#[test]
fn submesh_roles_and_transfer() {
    let m = generate_disk_in_disk(2.0, 4, 4).unwrap();
    let core = extract_submesh(&m, Region::Inclusion).unwrap();
    assert_eq!(core.roles(), vec![BoundaryTag::Interface]);
    let shell = extract_submesh(&m, Region::Shell).unwrap();
    assert_eq!(
        shell.roles(),
        vec![BoundaryTag::Interface, BoundaryTag::Outer]
    );
    assert_eq!(
        shell.role_nodes(BoundaryTag::Interface).len(),
        core.role_nodes(BoundaryTag::Interface).len()
    );

    let f: Vec<f64> = m
        .vertices()
        .iter()
        .map(|p| p[0] * 3.0 - p[1].sin())
        .collect();
    for sub in [&core, &shell] {
        let child = sub.restrict(&f);
        let back = sub.extend(&child, &vec![0.0; f.len()]);
        for &p in sub.to_parent() {
            assert_eq!(back[p], f[p]);
        }
        let tp = sub.to_parent();
        assert!(tp.windows(2).all(|w| w[0] < w[1]));
        for (c, &p) in tp.iter().enumerate() {
            assert_eq!(sub.child_of(p), Some(c));
        }
        for t in 0..sub.triangle_count() {
            assert!(sub.triangle_area(t) > 0.0);
        }
    }
    let area: f64 = (0..core.triangle_count())
        .map(|t| core.triangle_area(t))
        .sum();
    assert!((area - m.region_area(Region::Inclusion)).abs() < 1e-14);
}

#[test]
fn refinement_splits_and_snaps() {
    let m = generate_disk_in_disk(2.0, 4, 4).unwrap();
    let r = refine_uniform(&m).unwrap();
    assert_eq!(r.triangles().len(), 4 * m.triangles().len());
    assert_eq!(r.boundary_edges().len(), 2 * m.boundary_edges().len());
    for e in r.interface_edges() {
        for &v in &e.v {
            let p = r.vertices()[v];
            assert!((p[0].hypot(p[1]) - 1.0).abs() <= 1e-14);
        }
    }
    for e in r.outer_edges() {
        for &v in &e.v {
            let p = r.vertices()[v];
            assert!((p[0].hypot(p[1]) - 2.0).abs() <= 1e-14);
        }
    }
    // Without snapping the area is preserved exactly.
    let plain = refine_uniform(&m.clone().without_snapping()).unwrap();
    assert!((plain.total_area() - m.total_area()).abs() < 1e-12);
    assert!(r.region_area(Region::Inclusion) > m.region_area(Region::Inclusion));

    let loaded = parse_mesh(&write_mesh(&m), "m").unwrap();
    assert_eq!(loaded.meta(), MeshMeta::default());

    let sq = generate_square_with_disk(2.0, 4, 4).unwrap();
    let rs = refine_uniform(&sq).unwrap();
    for e in rs.outer_edges() {
        for &v in &e.v {
            let p = rs.vertices()[v];
            assert!((p[0].abs().max(p[1].abs()) - 2.0).abs() <= 1e-14);
        }
    }
}
