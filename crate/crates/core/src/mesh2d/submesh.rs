use std::collections::BTreeMap;

use super::{BoundaryTag, Mesh, Point, Region, Triangulation};
use crate::error::{Error, Result};

/// One region of a mesh as a standalone triangulation. Child vertices keep
/// the parent's relative order.
#[derive(Debug, Clone)]
pub struct Submesh {
    region: Region,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    parent_triangles: Vec<usize>,
    boundary: Vec<([usize; 2], BoundaryTag)>,
    to_parent: Vec<usize>,
    from_parent: Vec<Option<usize>>,
}

pub fn extract_submesh(mesh: &Mesh, region: Region) -> Result<Submesh> {
    let nodes = mesh.region_nodes(region);
    if nodes.is_empty() {
        return Err(Error::Invalid(format!("region {region:?} is empty")));
    }
    let mut from_parent = vec![None; mesh.vertices().len()];
    for (c, &p) in nodes.iter().enumerate() {
        from_parent[p] = Some(c);
    }
    let vertices = nodes.iter().map(|&p| mesh.vertices()[p]).collect();
    let mut triangles = Vec::new();
    let mut parent_triangles = Vec::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if tri.region == region {
            triangles.push(tri.v.map(|v| from_parent[v].unwrap()));
            parent_triangles.push(t);
        }
    }
    let mut tags = BTreeMap::new();
    for e in mesh.boundary_edges() {
        let [a, b] = e.v;
        tags.insert((a.min(b), a.max(b)), e.tag);
    }
    let mut count: BTreeMap<(usize, usize), (usize, [usize; 2])> = BTreeMap::new();
    for tri in &triangles {
        let [a, b, c] = *tri;
        for (p, q) in [(a, b), (b, c), (c, a)] {
            let e = count.entry((p.min(q), p.max(q))).or_insert((0, [p, q]));
            e.0 += 1;
        }
    }
    let mut boundary = Vec::new();
    for (&(a, b), &(k, oriented)) in &count {
        if k == 1 {
            let pa = nodes[a];
            let pb = nodes[b];
            let tag = tags
                .get(&(pa.min(pb), pa.max(pb)))
                .copied()
                .ok_or_else(|| {
                    Error::MeshValidation(format!(
                        "submesh boundary edge ({pa}, {pb}) carries no parent tag"
                    ))
                })?;
            boundary.push((oriented, tag));
        }
    }
    Ok(Submesh {
        region,
        vertices,
        triangles,
        parent_triangles,
        boundary,
        to_parent: nodes,
        from_parent,
    })
}

impl Submesh {
    pub fn region(&self) -> Region {
        self.region
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Parent index of each child triangle.
    pub fn parent_triangles(&self) -> &[usize] {
        &self.parent_triangles
    }

    /// Boundary edges oriented as in their child triangle, with the role
    /// they had in the parent.
    pub fn boundary_edges(&self) -> &[([usize; 2], BoundaryTag)] {
        &self.boundary
    }

    pub fn roles(&self) -> Vec<BoundaryTag> {
        let mut r: Vec<BoundaryTag> = self.boundary.iter().map(|e| e.1).collect();
        r.sort();
        r.dedup();
        r
    }

    /// Sorted child indices of vertices on edges of the given role.
    pub fn role_nodes(&self, role: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.1 == role)
            .flat_map(|e| e.0)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn to_parent(&self) -> &[usize] {
        &self.to_parent
    }

    pub fn child_of(&self, parent: usize) -> Option<usize> {
        self.from_parent.get(parent).copied().flatten()
    }

    /// Parent nodal values restricted to the child.
    pub fn restrict<T: Copy>(&self, parent_values: &[T]) -> Vec<T> {
        self.to_parent.iter().map(|&p| parent_values[p]).collect()
    }

    /// Child values written into a copy of `base` (parent sized).
    pub fn extend<T: Copy>(&self, child_values: &[T], base: &[T]) -> Vec<T> {
        let mut out = base.to_vec();
        for (c, &p) in self.to_parent.iter().enumerate() {
            out[p] = child_values[c];
        }
        out
    }
}

impl Triangulation for Submesh {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }
}
