use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::load_vector;
use crate::mesh2d::{BoundaryTag, Mesh};

/// Coefficients `F_0, …, F_J` of `F_δ = Σ δ^k F_k`, each constant on
/// every triangle of the full mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingField {
    coeffs: Vec<Vec<[f64; 2]>>,
}

/// Net flux allowed through an interior vertex patch, relative to
/// `max(1, max |F|)`.
pub const DIVERGENCE_TOL: f64 = 1e-12;

impl DrivingField {
    /// Validates shapes and weak divergence-freeness against `mesh`.
    pub fn new(mesh: &Mesh, coeffs: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("driving field needs at least F_0".into()));
        }
        let f = DrivingField { coeffs };
        for k in 0..f.coeffs.len() {
            let defect = f.divergence_defect(mesh, k)?;
            let scale = f.coeffs[k]
                .iter()
                .fold(1.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
            if defect > DIVERGENCE_TOL * scale {
                return Err(Error::Invalid(format!(
                    "F_{k} is not weakly divergence-free: interior patch flux {defect:e}"
                )));
            }
        }
        Ok(f)
    }

    /// `F_0` constant and every higher coefficient zero.
    pub fn constant(mesh: &Mesh, f0: [f64; 2], orders: usize) -> Result<Self> {
        let nt = mesh.triangles().len();
        let mut coeffs = vec![vec![f0; nt]];
        coeffs.extend((1..orders).map(|_| vec![[0.0; 2]; nt]));
        DrivingField::new(mesh, coeffs)
    }

    /// `∇^⊥ψ = (−∂_yψ, ∂_xψ)` of a nodal P1 stream function.
    pub fn rotated_gradient(mesh: &Mesh, psi: &[f64]) -> Vec<[f64; 2]> {
        mesh.triangles()
            .iter()
            .map(|t| {
                let p = t.v.map(|i| mesh.vertices()[i]);
                let e = crate::fem::Element::new(p);
                let mut g = [0.0; 2];
                for i in 0..3 {
                    g[0] += psi[t.v[i]] * e.grads[i][0];
                    g[1] += psi[t.v[i]] * e.grads[i][1];
                }
                [-g[1], g[0]]
            })
            .collect()
    }

    pub fn order_count(&self) -> usize {
        self.coeffs.len()
    }

    /// `F_k`, zero beyond the stored orders.
    pub fn coeff(&self, k: usize) -> Option<&[[f64; 2]]> {
        self.coeffs.get(k).map(|c| c.as_slice())
    }

    /// Largest `|∫ F_k·∇φ_i|` over vertices not on the outer boundary.
    pub fn divergence_defect(&self, mesh: &Mesh, k: usize) -> Result<f64> {
        let b = load_vector(mesh, &self.coeffs[k], |_| true)?;
        let mut outer = vec![false; b.len()];
        for i in mesh.tagged_nodes(BoundaryTag::Outer) {
            outer[i] = true;
        }
        Ok(b.iter()
            .zip(&outer)
            .filter(|(_, &o)| !o)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max))
    }
}

pub fn write_field(field: &DrivingField) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "field {}", field.coeffs.len());
    for c in &field.coeffs {
        for v in c {
            let _ = writeln!(s, "{:.16e} {:.16e}", v[0], v[1]);
        }
    }
    s
}

pub fn parse_field(text: &str, name: &str, mesh: &Mesh) -> Result<DrivingField> {
    let err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines
        .next()
        .ok_or_else(|| err(1, "empty field file".into()))?;
    let tok: Vec<&str> = head.split_whitespace().collect();
    let count: usize = match tok.as_slice() {
        ["field", n] => n
            .parse()
            .map_err(|_| err(ln, format!("invalid count `{n}`")))?,
        _ => return Err(err(ln, "expected `field <count>`".into())),
    };
    let nt = mesh.triangles().len();
    let mut coeffs = Vec::with_capacity(count);
    let mut last = ln;
    for k in 0..count {
        let mut c = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines.next().ok_or_else(|| {
                err(
                    last + 1,
                    format!("F_{k} ended early, expected {nt} triangle values"),
                )
            })?;
            last = ln;
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(ln, format!("malformed field value `{l}`")))?;
            if v.len() != 2 {
                return Err(err(ln, format!("expected `fx fy`, got `{l}`")));
            }
            c.push([v[0], v[1]]);
        }
        coeffs.push(c);
    }
    if let Some((ln, l)) = lines.next() {
        return Err(err(ln, format!("trailing content `{l}`")));
    }
    DrivingField::new(mesh, coeffs)
}

pub fn load_field(path: impl AsRef<Path>, mesh: &Mesh) -> Result<DrivingField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(&text, &path.display().to_string(), mesh)
}

pub fn save_field(field: &DrivingField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_field(field)).map_err(|e| Error::io(path, e))
}
