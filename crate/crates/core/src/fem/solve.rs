use super::{assemble_pair, load_vector, FEFunction};
use crate::error::{Error, Result};
use crate::linalg::{norm2, SparseLu, SparseMatrix};
use crate::mesh2d::{BoundaryTag, Point, Submesh, Triangulation};

/// Neumann data on a submesh boundary.
#[derive(Debug, Clone)]
pub enum FluxData {
    /// Constant normal flux per entry of `Submesh::boundary_edges`.
    EdgeFlux(Vec<f64>),
    /// Already integrated load `∫ σ φ_i`, one entry per child node.
    NodalLoad(Vec<f64>),
}

impl FluxData {
    /// Edge-wise data from a function of the edge midpoint and outward
    /// unit normal.
    pub fn from_normal_fn(sub: &Submesh, f: impl Fn(Point, [f64; 2]) -> f64) -> Self {
        let p = sub.vertices();
        FluxData::EdgeFlux(
            sub.boundary_edges()
                .iter()
                .map(|&([a, b], _)| {
                    let (pa, pb) = (p[a], p[b]);
                    let d = [pb[0] - pa[0], pb[1] - pa[1]];
                    let len = d[0].hypot(d[1]);
                    let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                    f(mid, [d[1] / len, -d[0] / len])
                })
                .collect(),
        )
    }

    fn nodal(&self, sub: &Submesh) -> Result<Vec<f64>> {
        let n = sub.vertex_count();
        match self {
            FluxData::EdgeFlux(s) => {
                let edges = sub.boundary_edges();
                if s.len() != edges.len() {
                    return Err(Error::Invalid(format!(
                        "{} edge fluxes for {} boundary edges",
                        s.len(),
                        edges.len()
                    )));
                }
                let mut g = vec![0.0; n];
                for (&([a, b], _), &sigma) in edges.iter().zip(s) {
                    let (pa, pb) = (sub.vertices()[a], sub.vertices()[b]);
                    let half = 0.5 * sigma * (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                    g[a] += half;
                    g[b] += half;
                }
                Ok(g)
            }
            FluxData::NodalLoad(g) => {
                if g.len() != n {
                    return Err(Error::Invalid(format!(
                        "nodal load of length {} on {} nodes",
                        g.len(),
                        n
                    )));
                }
                Ok(g.clone())
            }
        }
    }
}

/// Prescribed values on one boundary role.
#[derive(Debug, Clone)]
pub enum BoundaryValues {
    Constant(f64),
    /// Child-indexed; only the role's nodes are read.
    Nodal(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub h: FEFunction<f64>,
    /// Relative residual of the linear system actually solved.
    pub residual: f64,
}

fn field_load(sub: &Submesh, field: Option<&[[f64; 2]]>) -> Result<Vec<f64>> {
    match field {
        Some(f) => load_vector(sub, f, |_| true),
        None => Ok(vec![0.0; sub.vertex_count()]),
    }
}

/// Submatrix on the rows/columns where `keep[i]` is `Some(new index)`.
fn reduce(k: &SparseMatrix<f64>, keep: &[Option<usize>], nk: usize) -> Result<SparseMatrix<f64>> {
    let mut t = Vec::with_capacity(k.nnz());
    for i in 0..k.nrows() {
        if let Some(ri) = keep[i] {
            for (j, v) in k.row(i) {
                if let Some(rj) = keep[j] {
                    t.push((ri, rj, v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(nk, nk, &t)
}

fn rel_residual(
    k: &SparseMatrix<f64>,
    x: &[f64],
    rhs: &[f64],
    rows: impl Fn(usize) -> bool,
) -> f64 {
    let kx = k.mul_vec(x);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..rhs.len() {
        if rows(i) {
            num += (kx[i] - rhs[i]).powi(2);
            den += rhs[i].powi(2);
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Factored pure-Neumann problem on a submesh; solutions are mean-zero.
pub struct NeumannSolver<'a> {
    sub: &'a Submesh,
    k: SparseMatrix<f64>,
    lu: SparseLu<f64>,
    mass1: Vec<f64>,
    measure: f64,
}

impl<'a> NeumannSolver<'a> {
    pub fn new(sub: &'a Submesh) -> Result<Self> {
        let (k, m) = assemble_pair(sub, |_| true)?;
        let n = k.nrows();
        // Pin node 0; the dropped equation follows from compatibility.
        let keep: Vec<Option<usize>> = (0..n).map(|i| i.checked_sub(1)).collect();
        let lu = SparseLu::factor(&reduce(&k, &keep, n - 1)?)?;
        let mass1 = m.mul_vec(&vec![1.0; n]);
        let measure = mass1.iter().sum();
        Ok(NeumannSolver {
            sub,
            k,
            lu,
            mass1,
            measure,
        })
    }

    pub fn stiffness(&self) -> &SparseMatrix<f64> {
        &self.k
    }

    /// Solves `∫∇h·∇φ = ∮σφ − ∫F·∇φ` with `∫h = 0`. Fails when the net
    /// flux exceeds `tol` relative to the data; a smaller imbalance is
    /// projected out.
    pub fn solve(&self, flux: &FluxData, field: Option<&[[f64; 2]]>, tol: f64) -> Result<Solution> {
        self.solve_scaled(flux, field, tol, 0.0)
    }

    /// As [`solve`](Self::solve), with the imbalance also measured against
    /// `scale`, the magnitude of the terms that were summed to form the data.
    pub fn solve_scaled(
        &self,
        flux: &FluxData,
        field: Option<&[[f64; 2]]>,
        tol: f64,
        scale: f64,
    ) -> Result<Solution> {
        let g = flux.nodal(self.sub)?;
        let bf = field_load(self.sub, field)?;
        let mut rhs: Vec<f64> = g.iter().zip(&bf).map(|(g, b)| g - b).collect();
        let imbalance: f64 = rhs.iter().sum();
        let scale = scale.max(g.iter().chain(&bf).map(|x| x.abs()).sum());
        if imbalance.abs() > tol * scale {
            return Err(Error::Compatibility {
                imbalance,
                tolerance: tol * scale,
                context: "Neumann data".into(),
            });
        }
        for (r, w) in rhs.iter_mut().zip(&self.mass1) {
            *r -= imbalance * w / self.measure;
        }
        let mut x = vec![0.0];
        x.extend(self.lu.solve(&rhs[1..]));
        let mean: f64 = x.iter().zip(&self.mass1).map(|(a, b)| a * b).sum::<f64>() / self.measure;
        for v in &mut x {
            *v -= mean;
        }
        let residual = rel_residual(&self.k, &x, &rhs, |_| true);
        Ok(Solution {
            h: FEFunction::new(x),
            residual,
        })
    }

    /// Variational flux of `∇h + F` through the nodes of `role`.
    pub fn flux(&self, h: &[f64], field: Option<&[[f64; 2]]>, role: BoundaryTag) -> Result<f64> {
        variational_flux(self.sub, &self.k, h, field, role)
    }
}

/// Factored Dirichlet problem with every boundary role of the submesh
/// constrained.
pub struct DirichletSolver<'a> {
    sub: &'a Submesh,
    k: SparseMatrix<f64>,
    lu: SparseLu<f64>,
    free: Vec<Option<usize>>,
    roles: Vec<(BoundaryTag, Vec<usize>)>,
}

impl<'a> DirichletSolver<'a> {
    pub fn new(sub: &'a Submesh) -> Result<Self> {
        let (k, _) = assemble_pair(sub, |_| true)?;
        let n = k.nrows();
        let roles: Vec<(BoundaryTag, Vec<usize>)> = sub
            .roles()
            .into_iter()
            .map(|r| (r, sub.role_nodes(r)))
            .collect();
        let mut constrained = vec![false; n];
        for (_, nodes) in &roles {
            for &i in nodes {
                constrained[i] = true;
            }
        }
        let mut free = vec![None; n];
        let mut nf = 0;
        for i in 0..n {
            if !constrained[i] {
                free[i] = Some(nf);
                nf += 1;
            }
        }
        if nf == 0 {
            return Err(Error::Invalid(
                "Dirichlet problem without free nodes".into(),
            ));
        }
        let lu = SparseLu::factor(&reduce(&k, &free, nf)?)?;
        Ok(DirichletSolver {
            sub,
            k,
            lu,
            free,
            roles,
        })
    }

    pub fn stiffness(&self) -> &SparseMatrix<f64> {
        &self.k
    }

    /// Solves `∫(∇h + F)·∇φ = 0` for φ vanishing on the boundary, with
    /// `h` interpolating the given data. When two roles share a node the
    /// value listed first wins.
    pub fn solve(
        &self,
        data: &[(BoundaryTag, BoundaryValues)],
        field: Option<&[[f64; 2]]>,
    ) -> Result<Solution> {
        let n = self.k.nrows();
        let mut x = vec![0.0; n];
        let mut set = vec![false; n];
        for (role, nodes) in &self.roles {
            let Some((_, vals)) = data.iter().find(|(r, _)| r == role) else {
                return Err(Error::MissingRole(role.to_string()));
            };
            if let BoundaryValues::Nodal(v) = vals {
                if v.len() != n {
                    return Err(Error::Invalid(format!(
                        "{role} values of length {} on {} nodes",
                        v.len(),
                        n
                    )));
                }
            }
            for &i in nodes {
                let v = match vals {
                    BoundaryValues::Constant(c) => *c,
                    BoundaryValues::Nodal(v) => v[i],
                };
                if !set[i] {
                    x[i] = v;
                    set[i] = true;
                }
            }
        }
        let bf = field_load(self.sub, field)?;
        let kx = self.k.mul_vec(&x);
        let nf = self.free.iter().flatten().count();
        let mut rhs = vec![0.0; nf];
        for i in 0..n {
            if let Some(r) = self.free[i] {
                rhs[r] = -bf[i] - kx[i];
            }
        }
        let y = self.lu.solve(&rhs);
        for i in 0..n {
            if let Some(r) = self.free[i] {
                x[i] = y[r];
            }
        }
        let kx = self.k.mul_vec(&x);
        let defect: Vec<f64> = (0..n)
            .filter(|&i| self.free[i].is_some())
            .map(|i| kx[i] + bf[i])
            .collect();
        let scale = norm2(&rhs);
        let residual = norm2(&defect) / if scale > 0.0 { scale } else { 1.0 };
        Ok(Solution {
            h: FEFunction::new(x),
            residual,
        })
    }

    pub fn flux(&self, h: &[f64], field: Option<&[[f64; 2]]>, role: BoundaryTag) -> Result<f64> {
        variational_flux(self.sub, &self.k, h, field, role)
    }
}

fn variational_flux(
    sub: &Submesh,
    k: &SparseMatrix<f64>,
    h: &[f64],
    field: Option<&[[f64; 2]]>,
    role: BoundaryTag,
) -> Result<f64> {
    if h.len() != sub.vertex_count() {
        return Err(Error::Invalid(format!(
            "function of length {} on a submesh with {} nodes",
            h.len(),
            sub.vertex_count()
        )));
    }
    let kh = k.mul_vec(h);
    let bf = field_load(sub, field)?;
    Ok(sub.role_nodes(role).iter().map(|&i| kh[i] + bf[i]).sum())
}

pub fn solve_neumann(
    sub: &Submesh,
    flux: &FluxData,
    field: Option<&[[f64; 2]]>,
    tol: f64,
) -> Result<Solution> {
    NeumannSolver::new(sub)?.solve(flux, field, tol)
}

pub fn solve_dirichlet(
    sub: &Submesh,
    data: &[(BoundaryTag, BoundaryValues)],
    field: Option<&[[f64; 2]]>,
) -> Result<Solution> {
    DirichletSolver::new(sub)?.solve(data, field)
}

/// `∮_role (∇h + F)·ν`, computed as the residual of the weak form tested
/// with the indicator of the role's nodes.
pub fn boundary_flux(
    sub: &Submesh,
    h: &[f64],
    field: Option<&[[f64; 2]]>,
    role: BoundaryTag,
) -> Result<f64> {
    let (k, _) = assemble_pair(sub, |_| true)?;
    variational_flux(sub, &k, h, field, role)
}
