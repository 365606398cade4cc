//! P1 finite elements on tagged meshes.

mod solve;

pub use solve::{
    boundary_flux, solve_dirichlet, solve_neumann, BoundaryValues, DirichletSolver, FluxData,
    NeumannSolver, Solution,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Scalar, SparseMatrix};
use crate::mesh2d::{BoundaryTag, Mesh, Point, Region, Triangulation};

/// Piecewise-constant coefficient, one value per region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientField {
    pub inclusion: Complex64,
    pub shell: Complex64,
}

impl CoefficientField {
    /// `1` on the inclusion and `delta` on the shell.
    pub fn contrast(delta: Complex64) -> Self {
        CoefficientField {
            inclusion: Complex64::new(1.0, 0.0),
            shell: delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSelector {
    Inclusion,
    Shell,
    All,
}

/// Nodal values on some triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct FEFunction<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> FEFunction<T> {
    pub fn new(values: Vec<T>) -> Self {
        FEFunction { values }
    }

    pub fn zeros(n: usize) -> Self {
        FEFunction {
            values: vec![T::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn interpolate<T: Scalar>(tri: &impl Triangulation, f: impl Fn(Point) -> T) -> FEFunction<T> {
    FEFunction::new(tri.vertices().iter().map(|&p| f(p)).collect())
}

/// Element data of a P1 triangle.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub area: f64,
    /// Gradients of the three barycentric coordinates.
    pub grads: [[f64; 2]; 3],
}

impl Element {
    pub fn new(p: [Point; 3]) -> Self {
        let area = crate::mesh2d::signed_area(p[0], p[1], p[2]);
        let mut grads = [[0.0; 2]; 3];
        for (i, g) in grads.iter_mut().enumerate() {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            *g = [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)];
        }
        Element { area, grads }
    }

    pub fn stiffness(&self) -> [[f64; 3]; 3] {
        let mut k = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (gi, gj) = (self.grads[i], self.grads[j]);
                k[i][j] = self.area * (gi[0] * gj[0] + gi[1] * gj[1]);
            }
        }
        k
    }

    pub fn mass(&self) -> [[f64; 3]; 3] {
        let mut m = [[self.area / 12.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = self.area / 6.0;
        }
        m
    }

    /// `∫_T F·∇φ_i` for a constant field F.
    pub fn divergence_load(&self, f: [f64; 2]) -> [f64; 3] {
        self.grads.map(|g| self.area * (f[0] * g[0] + f[1] * g[1]))
    }
}

pub(crate) fn element(tri: &impl Triangulation, t: usize) -> Result<Element> {
    let v = tri.triangle(t);
    let p = v.map(|i| tri.vertices()[i]);
    let e = Element::new(p);
    let scale = p
        .iter()
        .flat_map(|q| q.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    if !(e.area > 1e-14 * scale * scale) {
        return Err(Error::MeshValidation(format!(
            "degenerate triangle {t} (area {:e})",
            e.area
        )));
    }
    Ok(e)
}

/// Stiffness and consistent mass of all triangles accepted by `keep`.
pub(crate) fn assemble_pair(
    tri: &impl Triangulation,
    keep: impl Fn(usize) -> bool,
) -> Result<(SparseMatrix<f64>, SparseMatrix<f64>)> {
    let n = tri.vertex_count();
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for t in 0..tri.triangle_count() {
        if !keep(t) {
            continue;
        }
        let e = element(tri, t)?;
        let v = tri.triangle(t);
        let (k, m) = (e.stiffness(), e.mass());
        for i in 0..3 {
            for j in 0..3 {
                kt.push((v[i], v[j], k[i][j]));
                mt.push((v[i], v[j], m[i][j]));
            }
        }
    }
    Ok((
        SparseMatrix::from_triplets(n, n, &kt)?,
        SparseMatrix::from_triplets(n, n, &mt)?,
    ))
}

/// `b_i = ∫ F·∇φ_i` for a per-triangle constant field, restricted to the
/// triangles accepted by `keep`.
pub fn load_vector(
    tri: &impl Triangulation,
    field: &[[f64; 2]],
    keep: impl Fn(usize) -> bool,
) -> Result<Vec<f64>> {
    if field.len() != tri.triangle_count() {
        return Err(Error::Invalid(format!(
            "field has {} triangle values, mesh has {} triangles",
            field.len(),
            tri.triangle_count()
        )));
    }
    let mut b = vec![0.0; tri.vertex_count()];
    for t in 0..tri.triangle_count() {
        if !keep(t) {
            continue;
        }
        let e = element(tri, t)?;
        let l = e.divergence_load(field[t]);
        for (i, &v) in tri.triangle(t).iter().enumerate() {
            b[v] += l[i];
        }
    }
    Ok(b)
}

/// Global stiffness and mass matrices split by region.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub a: SparseMatrix<f64>,
    pub a_d: SparseMatrix<f64>,
    pub a_s: SparseMatrix<f64>,
    pub m: SparseMatrix<f64>,
    pub m_d: SparseMatrix<f64>,
    pub m_s: SparseMatrix<f64>,
    pub interface_nodes: Vec<usize>,
    pub outer_nodes: Vec<usize>,
    pub inclusion_nodes: Vec<usize>,
    pub shell_nodes: Vec<usize>,
    pub inclusion_area: f64,
    pub shell_area: f64,
}

pub fn assemble(mesh: &Mesh) -> Result<AssembledForms> {
    let region = |r: Region| move |t: usize| mesh.triangles()[t].region == r;
    let (a_d, m_d) = assemble_pair(mesh, region(Region::Inclusion))?;
    let (a_s, m_s) = assemble_pair(mesh, region(Region::Shell))?;
    let a = a_d.lin_comb(1.0, &a_s, 1.0)?;
    let m = m_d.lin_comb(1.0, &m_s, 1.0)?;
    Ok(AssembledForms {
        a,
        a_d,
        a_s,
        m,
        m_d,
        m_s,
        interface_nodes: mesh.tagged_nodes(BoundaryTag::Interface),
        outer_nodes: mesh.tagged_nodes(BoundaryTag::Outer),
        inclusion_nodes: mesh.region_nodes(Region::Inclusion),
        shell_nodes: mesh.region_nodes(Region::Shell),
        inclusion_area: mesh.region_area(Region::Inclusion),
        shell_area: mesh.region_area(Region::Shell),
    })
}

impl AssembledForms {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `c_D M_D + c_S M_S`
    pub fn weighted_mass(&self, c: CoefficientField) -> SparseMatrix<Complex64> {
        self.m_d
            .to_complex()
            .lin_comb(c.inclusion, &self.m_s.to_complex(), c.shell)
            .expect("region masses share a shape")
    }

    /// `c_D A_D + c_S A_S`
    pub fn weighted_stiffness(&self, c: CoefficientField) -> SparseMatrix<Complex64> {
        self.a_d
            .to_complex()
            .lin_comb(c.inclusion, &self.a_s.to_complex(), c.shell)
            .expect("region stiffnesses share a shape")
    }

    fn select(&self, r: RegionSelector) -> (&SparseMatrix<f64>, &SparseMatrix<f64>) {
        match r {
            RegionSelector::Inclusion => (&self.a_d, &self.m_d),
            RegionSelector::Shell => (&self.a_s, &self.m_s),
            RegionSelector::All => (&self.a, &self.m),
        }
    }

    /// `(‖v‖_L², |v|_H¹)` over the selected region.
    pub fn norms<T: Scalar>(&self, v: &[T], r: RegionSelector) -> (f64, f64) {
        let (a, m) = self.select(r);
        (herm_form(m, v).sqrt(), herm_form(a, v).sqrt())
    }

    /// Full H¹ norm over the selected region.
    pub fn h1_norm<T: Scalar>(&self, v: &[T], r: RegionSelector) -> f64 {
        let (l2, semi) = self.norms(v, r);
        l2.hypot(semi)
    }
}

/// `vᴴ A v` for a real symmetric A, clamped at zero.
fn herm_form<T: Scalar>(a: &SparseMatrix<f64>, v: &[T]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        let mut row = T::zero();
        for (j, x) in a.row(i) {
            row += v[j] * T::from_f64(x);
        }
        s += (v[i].conj() * row).to_complex().re;
    }
    s.max(0.0)
}
