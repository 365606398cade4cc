//! Tagged triangle meshes of a core D inside a shell, with generators,
//! a text format and submesh extraction.

mod generate;
mod io;
mod refine;
mod submesh;

use std::collections::BTreeMap;

pub use generate::{generate_disk_in_disk, generate_square_with_disk};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use refine::refine_uniform;
pub use submesh::{extract_submesh, Submesh};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Inclusion,
    Shell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Interface,
    Outer,
}

impl std::fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryTag::Interface => write!(f, "INTERFACE"),
            BoundaryTag::Outer => write!(f, "OUTER"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub v: [usize; 3],
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub tag: BoundaryTag,
}

/// Shape that refinement projects new outer-boundary vertices onto.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterShape {
    Circle(f64),
    Square(f64),
}

/// Which generator built the mesh. Loaded meshes carry none, so their refinement is
/// pure midpoint subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeshMeta {
    pub snap_interface: Option<f64>,
    pub snap_outer: Option<OuterShape>,
}

/// Anything P1 elements can be assembled on.
pub trait Triangulation {
    fn vertices(&self) -> &[Point];
    fn triangle_count(&self) -> usize;
    fn triangle(&self, t: usize) -> [usize; 3];

    fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        signed_area(self.vertices()[a], self.vertices()[b], self.vertices()[c])
    }
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    boundary: Vec<BoundaryEdge>,
    meta: MeshMeta,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Validates and builds a mesh.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: Vec<BoundaryEdge>,
        meta: MeshMeta,
    ) -> Result<Self> {
        let mesh = Mesh {
            vertices,
            triangles,
            boundary,
            meta,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn interface_edges(&self) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary
            .iter()
            .filter(|e| e.tag == BoundaryTag::Interface)
    }

    pub fn outer_edges(&self) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary.iter().filter(|e| e.tag == BoundaryTag::Outer)
    }

    pub fn meta(&self) -> MeshMeta {
        self.meta
    }

    /// Same mesh without refinement snapping.
    pub fn without_snapping(mut self) -> Self {
        self.meta = MeshMeta::default();
        self
    }

    pub fn region_area(&self, region: Region) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].region == region)
            .map(|t| Triangulation::triangle_area(self, t))
            .sum()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| Triangulation::triangle_area(self, t))
            .sum()
    }

    /// Sorted vertex indices on edges with the given tag.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.tag == tag)
            .flat_map(|e| e.v)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Sorted vertex indices touched by triangles of `region`.
    pub fn region_nodes(&self, region: Region) -> Vec<usize> {
        let mut mark = vec![false; self.vertices.len()];
        for t in self.triangles.iter().filter(|t| t.region == region) {
            for &v in &t.v {
                mark[v] = true;
            }
        }
        (0..mark.len()).filter(|&i| mark[i]).collect()
    }

    /// Edge list (sorted pairs) with the triangles on each side.
    pub fn edge_map(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.v;
            for (p, q) in [(a, b), (b, c), (c, a)] {
                map.entry(key(p, q)).or_default().push(t);
            }
        }
        map
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        let fail = |m: String| Err(Error::MeshValidation(m));
        if self.triangles.is_empty() {
            return fail("mesh has no triangles".into());
        }
        for (i, p) in self.vertices.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return fail(format!("vertex {i} has non-finite coordinates"));
            }
        }
        let mut used = vec![false; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in &tri.v {
                if v >= n {
                    return fail(format!("triangle {t} references missing vertex {v}"));
                }
                used[v] = true;
            }
            let [a, b, c] = tri.v;
            if a == b || b == c || a == c {
                return fail(format!("triangle {t} repeats a vertex"));
            }
            let area = signed_area(self.vertices[a], self.vertices[b], self.vertices[c]);
            if !(area > 0.0) {
                return fail(format!(
                    "triangle {t} has non-positive signed area {area:e}"
                ));
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return fail(format!("vertex {v} belongs to no triangle"));
        }

        let edges = self.edge_map();
        let mut tags: BTreeMap<(usize, usize), BoundaryTag> = BTreeMap::new();
        for e in &self.boundary {
            let [a, b] = e.v;
            if a >= n || b >= n || a == b {
                return fail(format!("boundary edge ({a}, {b}) is invalid"));
            }
            if tags.insert(key(a, b), e.tag).is_some() {
                return fail(format!("boundary edge ({a}, {b}) is listed twice"));
            }
        }
        for (&(a, b), tris) in &edges {
            if tris.len() > 2 {
                return fail(format!(
                    "edge ({a}, {b}) is shared by {} triangles",
                    tris.len()
                ));
            }
            let tag = tags.get(&(a, b)).copied();
            if tris.len() == 1 {
                if tag != Some(BoundaryTag::Outer) {
                    return fail(format!(
                        "edge ({a}, {b}) lies on a single triangle but is not tagged OUTER \
                         (hanging node or untagged boundary)"
                    ));
                }
            } else {
                let (r0, r1) = (
                    self.triangles[tris[0]].region,
                    self.triangles[tris[1]].region,
                );
                match (r0 != r1, tag) {
                    (true, Some(BoundaryTag::Interface)) | (false, None) => {}
                    (true, _) => {
                        return fail(format!(
                            "edge ({a}, {b}) separates INCLUSION from SHELL but is not tagged INTERFACE"
                        ))
                    }
                    (false, Some(t)) => {
                        return fail(format!(
                            "edge ({a}, {b}) is tagged {t} but lies inside one region"
                        ))
                    }
                }
                // neighbours must traverse the shared edge in opposite senses
                let dir = |t: usize| {
                    let v = self.triangles[t].v;
                    (0..3).any(|k| v[k] == a && v[(k + 1) % 3] == b)
                };
                if dir(tris[0]) == dir(tris[1]) {
                    return fail(format!(
                        "triangles on edge ({a}, {b}) are inconsistently oriented"
                    ));
                }
            }
        }
        for &(a, b) in tags.keys() {
            if !edges.contains_key(&(a, b)) {
                return fail(format!(
                    "boundary edge ({a}, {b}) is not an edge of any triangle"
                ));
            }
        }

        // connectivity of the inclusion through shared edges
        let incl: Vec<usize> = (0..self.triangles.len())
            .filter(|&t| self.triangles[t].region == Region::Inclusion)
            .collect();
        if incl.is_empty() {
            return fail("mesh has no INCLUSION triangles".into());
        }
        let mut seen = vec![false; self.triangles.len()];
        let mut stack = vec![incl[0]];
        seen[incl[0]] = true;
        let mut count = 0;
        while let Some(t) = stack.pop() {
            count += 1;
            let [a, b, c] = self.triangles[t].v;
            for (p, q) in [(a, b), (b, c), (c, a)] {
                for &s in &edges[&key(p, q)] {
                    if !seen[s] && self.triangles[s].region == Region::Inclusion {
                        seen[s] = true;
                        stack.push(s);
                    }
                }
            }
        }
        if count != incl.len() {
            return fail("INCLUSION region is not connected".into());
        }
        Ok(())
    }
}

impl Triangulation for Mesh {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t].v
    }
}
