use std::collections::BTreeMap;

use super::{BoundaryEdge, BoundaryTag, Mesh, OuterShape, Triangle};
use crate::error::Result;

/// Splits every triangle into four through edge midpoints. When the mesh
/// carries snapping metadata, midpoints of tagged edges are projected back
/// onto the interface circle and the outer shape.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let mut verts = mesh.vertices().to_vec();
    let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 2]>| -> usize {
        let k = if a < b { (a, b) } else { (b, a) };
        *mid.entry(k).or_insert_with(|| {
            let (p, q) = (verts[a], verts[b]);
            verts.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            verts.len() - 1
        })
    };
    let mut tris = Vec::with_capacity(4 * mesh.triangles().len());
    for t in mesh.triangles() {
        let [a, b, c] = t.v;
        let ab = midpoint(a, b, &mut verts);
        let bc = midpoint(b, c, &mut verts);
        let ca = midpoint(c, a, &mut verts);
        for v in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
            tris.push(Triangle {
                v,
                region: t.region,
            });
        }
    }
    let meta = mesh.meta();
    let mut boundary = Vec::with_capacity(2 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let [a, b] = e.v;
        let m = midpoint(a, b, &mut verts);
        let p = verts[m];
        let snapped = match e.tag {
            BoundaryTag::Interface => meta.snap_interface.map(|r| {
                let s = r / p[0].hypot(p[1]);
                [p[0] * s, p[1] * s]
            }),
            BoundaryTag::Outer => meta.snap_outer.map(|shape| match shape {
                OuterShape::Circle(r) => {
                    let s = r / p[0].hypot(p[1]);
                    [p[0] * s, p[1] * s]
                }
                OuterShape::Square(l) => {
                    let s = l / p[0].abs().max(p[1].abs());
                    [p[0] * s, p[1] * s]
                }
            }),
        };
        if let Some(q) = snapped {
            verts[m] = q;
        }
        boundary.push(BoundaryEdge {
            v: [a, m],
            tag: e.tag,
        });
        boundary.push(BoundaryEdge {
            v: [m, b],
            tag: e.tag,
        });
    }
    Mesh::new(verts, tris, boundary, meta)
}
