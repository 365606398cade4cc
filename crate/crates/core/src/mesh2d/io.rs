use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryEdge, BoundaryTag, Mesh, MeshMeta, Region, Triangle};
use crate::error::{Error, Result};

/// Serializes in the `enzmesh 1 2` text format.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("enzmesh 1 2\n");
    let _ = writeln!(s, "vertices {}", mesh.vertices().len());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e}", p[0], p[1]);
    }
    let _ = writeln!(s, "triangles {}", mesh.triangles().len());
    for t in mesh.triangles() {
        let r = match t.region {
            Region::Inclusion => 0,
            Region::Shell => 1,
        };
        let _ = writeln!(s, "{} {} {} {}", t.v[0], t.v[1], t.v[2], r);
    }
    let _ = writeln!(s, "boundary {}", mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let tag = match e.tag {
            BoundaryTag::Interface => 0,
            BoundaryTag::Outer => 1,
        };
        let _ = writeln!(s, "{} {} {}", e.v[0], e.v[1], tag);
    }
    s
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_mesh(mesh)).map_err(|e| Error::io(path, e))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, &path.display().to_string())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    name: &'a str,
    last: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.name.to_string(),
            line,
            msg: msg.into(),
        }
    }

    /// Next non-blank line, split into tokens.
    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, l) in self.inner.by_ref() {
            let t: Vec<&str> = l.split_whitespace().collect();
            if !t.is_empty() {
                self.last = i + 1;
                return Ok((i + 1, t));
            }
        }
        Err(self.err(
            self.last + 1,
            format!("unexpected end of file, expected {what}"),
        ))
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let (ln, t) = self.next(name)?;
        if t.len() != 2 || t[0] != name {
            return Err(self.err(ln, format!("expected `{name} <count>`")));
        }
        t[1].parse()
            .map_err(|_| self.err(ln, format!("invalid {name} count `{}`", t[1])))
    }

    fn fields<T: std::str::FromStr>(&mut self, what: &str, n: usize) -> Result<(usize, Vec<T>)> {
        let (ln, t) = self.next(what)?;
        if t.len() != n {
            return Err(self.err(
                ln,
                format!("expected {n} fields for a {what} line, got {}", t.len()),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for tok in t {
            out.push(
                tok.parse()
                    .map_err(|_| self.err(ln, format!("malformed {what} field `{tok}`")))?,
            );
        }
        Ok((ln, out))
    }
}

/// Parses the text format. `name` labels parse errors.
pub fn parse_mesh(text: &str, name: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        name,
        last: 0,
    };
    let (ln, head) = lines.next("header")?;
    if head != ["enzmesh", "1", "2"] {
        return Err(lines.err(ln, "expected header `enzmesh 1 2`"));
    }
    let nv = lines.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (_, v) = lines.fields::<f64>("vertex", 2)?;
        vertices.push([v[0], v[1]]);
    }
    let nt = lines.header("triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, v) = lines.fields::<usize>("triangle", 4)?;
        let region = match v[3] {
            0 => Region::Inclusion,
            1 => Region::Shell,
            r => return Err(lines.err(ln, format!("unknown region tag {r}"))),
        };
        for &i in &v[..3] {
            if i >= nv {
                return Err(lines.err(ln, format!("vertex index {i} out of range")));
            }
        }
        triangles.push(Triangle {
            v: [v[0], v[1], v[2]],
            region,
        });
    }
    let nb = lines.header("boundary")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, v) = lines.fields::<usize>("boundary", 3)?;
        let tag = match v[2] {
            0 => BoundaryTag::Interface,
            1 => BoundaryTag::Outer,
            t => return Err(lines.err(ln, format!("unknown boundary tag {t}"))),
        };
        for &i in &v[..2] {
            if i >= nv {
                return Err(lines.err(ln, format!("vertex index {i} out of range")));
            }
        }
        boundary.push(BoundaryEdge {
            v: [v[0], v[1]],
            tag,
        });
    }
    if let Some((i, l)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(lines.err(i + 1, format!("trailing content `{}`", l.trim())));
    }
    Mesh::new(vertices, triangles, boundary, MeshMeta::default())
}
