use std::f64::consts::PI;

use super::{BoundaryEdge, BoundaryTag, Mesh, MeshMeta, OuterShape, Point, Region, Triangle};
use crate::error::{Error, Result};

/// Triangles between two closed rings whose points sit at angles
/// `2πk/na` and `2πk/nb`, both starting at angle 0. Angles are compared in
/// integer arithmetic so the pattern repeats exactly under rotation.
fn zip_rings(a: &[usize], b: &[usize], region: Region, out: &mut Vec<Triangle>) {
    let (na, nb) = (a.len(), b.len());
    if na == 1 {
        for j in 0..nb {
            out.push(Triangle {
                v: [a[0], b[j], b[(j + 1) % nb]],
                region,
            });
        }
        return;
    }
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        // advance the outer ring while its next angle does not pass the inner one
        let outer_first = j < nb && (i == na || (j + 1) * na <= (i + 1) * nb);
        if outer_first {
            out.push(Triangle {
                v: [a[i % na], b[j], b[(j + 1) % nb]],
                region,
            });
            j += 1;
        } else {
            out.push(Triangle {
                v: [a[i], b[j % nb], a[(i + 1) % na]],
                region,
            });
            i += 1;
        }
    }
}

fn ring_angle(k: usize, n: usize) -> (f64, f64) {
    let t = 2.0 * PI * k as f64 / n as f64;
    t.sin_cos()
}

/// Core of hexagonal rings up to r = 1. Returns the vertex lists of all rings.
fn build_core(nc: usize, verts: &mut Vec<Point>, tris: &mut Vec<Triangle>) -> Vec<Vec<usize>> {
    let mut rings = vec![vec![0usize]];
    verts.push([0.0, 0.0]);
    for i in 1..=nc {
        let count = 6 * i;
        let r = i as f64 / nc as f64;
        let mut ring = Vec::with_capacity(count);
        for k in 0..count {
            let (s, c) = ring_angle(k, count);
            ring.push(verts.len());
            // the last ring is exactly on the unit circle
            verts.push(if i == nc { [c, s] } else { [r * c, r * s] });
        }
        zip_rings(&rings[i - 1], &ring, Region::Inclusion, tris);
        rings.push(ring);
    }
    rings
}

fn ring_edges(ring: &[usize], tag: BoundaryTag, out: &mut Vec<BoundaryEdge>) {
    let n = ring.len();
    for k in 0..n {
        out.push(BoundaryEdge {
            v: [ring[k], ring[(k + 1) % n]],
            tag,
        });
    }
}

fn build(
    nc: usize,
    ns: usize,
    shell_point: impl Fn(usize, f64, f64) -> Point,
    meta: MeshMeta,
) -> Result<Mesh> {
    if nc < 2 || ns < 2 {
        return Err(Error::Invalid(format!(
            "ring counts must be at least 2, got ({nc}, {ns})"
        )));
    }
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    let rings = build_core(nc, &mut verts, &mut tris);
    let count = 6 * nc;
    let mut prev = rings[nc].clone();
    let mut boundary = Vec::new();
    ring_edges(&prev, BoundaryTag::Interface, &mut boundary);
    for j in 1..=ns {
        let mut ring = Vec::with_capacity(count);
        for k in 0..count {
            let (s, c) = ring_angle(k, count);
            ring.push(verts.len());
            verts.push(shell_point(j, c, s));
        }
        zip_rings(&prev, &ring, Region::Shell, &mut tris);
        prev = ring;
    }
    ring_edges(&prev, BoundaryTag::Outer, &mut boundary);
    Mesh::new(verts, tris, boundary, meta)
}

/// Polar mesh of the unit disk inside the disk of radius `big_r`.
/// The core has `rings_core` hexagonal rings; the shell has `rings_shell`
/// rings of `6·rings_core` vertices each.
pub fn generate_disk_in_disk(big_r: f64, rings_core: usize, rings_shell: usize) -> Result<Mesh> {
    if !(big_r > 1.0) || !big_r.is_finite() {
        return Err(Error::Invalid(format!(
            "outer radius must exceed 1, got {big_r}"
        )));
    }
    let ns = rings_shell;
    build(
        rings_core,
        rings_shell,
        |j, c, s| {
            let r = if j == ns {
                big_r
            } else {
                1.0 + (big_r - 1.0) * j as f64 / ns as f64
            };
            [r * c, r * s]
        },
        MeshMeta {
            snap_interface: Some(1.0),
            snap_outer: Some(OuterShape::Circle(big_r)),
        },
    )
}

/// Unit disk inside the square `|x|_∞ ≤ half_side`. Shell rings blend the
/// unit circle into the square along shared angles.
pub fn generate_square_with_disk(
    half_side: f64,
    rings_core: usize,
    rings_blend: usize,
) -> Result<Mesh> {
    if !(half_side > 1.0) || !half_side.is_finite() {
        return Err(Error::Invalid(format!(
            "half side must exceed 1, got {half_side}"
        )));
    }
    let ns = rings_blend;
    build(
        rings_core,
        rings_blend,
        |j, c, s| {
            let m = c.abs().max(s.abs());
            let sq = [half_side * c / m, half_side * s / m];
            if j == ns {
                return sq;
            }
            let t = j as f64 / ns as f64;
            [(1.0 - t) * c + t * sq[0], (1.0 - t) * s + t * sq[1]]
        },
        MeshMeta {
            snap_interface: Some(1.0),
            snap_outer: Some(OuterShape::Square(half_side)),
        },
    )
}
