//! Order-by-order construction of the δ-expansion `h_δ = Σ δ^k h_k` of the
//! degenerate Helmholtz projection and its comparison with a direct solve.

mod field;

pub use field::{load_field, parse_field, save_field, write_field, DrivingField, DIVERGENCE_TOL};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{
    assemble, boundary_flux, load_vector, AssembledForms, BoundaryValues, DirichletSolver, Element,
    FluxData, NeumannSolver, RegionSelector,
};
use crate::linalg::{norm2, SparseLu, SparseMatrix};
use crate::mesh2d::{extract_submesh, BoundaryTag, Mesh, Region, Submesh};

type C = Complex64;

/// Flux balance accepted by the interior Neumann solves.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Mesh, forms and the two region submeshes.
pub struct CascadeGeometry<'m> {
    pub mesh: &'m Mesh,
    pub forms: AssembledForms,
    pub core: Submesh,
    pub shell: Submesh,
}

impl<'m> CascadeGeometry<'m> {
    pub fn new(mesh: &'m Mesh) -> Result<Self> {
        Ok(CascadeGeometry {
            mesh,
            forms: assemble(mesh)?,
            core: extract_submesh(mesh, Region::Inclusion)?,
            shell: extract_submesh(mesh, Region::Shell)?,
        })
    }

    fn region_load(&self, f: Option<&[[f64; 2]]>, region: Region) -> Result<Vec<f64>> {
        match f {
            Some(f) => load_vector(self.mesh, f, |t| self.mesh.triangles()[t].region == region),
            None => Ok(vec![0.0; self.mesh.vertices().len()]),
        }
    }
}

fn restrict_field(sub: &Submesh, f: Option<&[[f64; 2]]>) -> Option<Vec<[f64; 2]>> {
    f.map(|f| sub.parent_triangles().iter().map(|&t| f[t]).collect())
}

/// Shell potential: harmonic, 0 on the interface, 1 on the outer
/// boundary, extended by 0 into the inclusion.
#[derive(Debug, Clone)]
pub struct Psi {
    pub values: Vec<f64>,
    /// `∫ |∇Ψ|²` over the shell.
    pub energy: f64,
    /// Variational outer flux of Ψ.
    pub outer_flux: f64,
}

pub fn solve_psi(geo: &CascadeGeometry) -> Result<Psi> {
    let solver = DirichletSolver::new(&geo.shell)?;
    psi_with(geo, &solver)
}

fn psi_with(geo: &CascadeGeometry, solver: &DirichletSolver) -> Result<Psi> {
    let s = solver.solve(
        &[
            (BoundaryTag::Interface, BoundaryValues::Constant(0.0)),
            (BoundaryTag::Outer, BoundaryValues::Constant(1.0)),
        ],
        None,
    )?;
    let child = &s.h.values;
    let energy = solver.stiffness().form(child, child);
    let outer_flux = solver.flux(child, None, BoundaryTag::Outer)?;
    if !(energy > 0.0) {
        return Err(Error::Invalid("shell potential has no energy".into()));
    }
    let values = geo
        .shell
        .extend(child, &vec![0.0; geo.mesh.vertices().len()]);
    Ok(Psi {
        values,
        energy,
        outer_flux,
    })
}

#[derive(Debug, Clone)]
pub struct CascadeState {
    pub psi: Psi,
    /// `h_0, …, h_K` on the full mesh.
    pub h: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    /// `‖h_k‖_{H¹(Ω)}`
    pub norms: Vec<f64>,
    /// Re-measured `|∮_∂Ω (∇h_k + F_k)·ν|` per order.
    pub outer_flux_defects: Vec<f64>,
    /// `∫_D h_k / |D|` per order.
    pub inclusion_means: Vec<f64>,
    /// Largest gap between the inclusion and shell values of `h_k` on the
    /// interface before merging.
    pub interface_jumps: Vec<f64>,
}

impl CascadeState {
    /// `‖h_{k+1}‖ / ‖h_k‖` per order.
    pub fn growth_ratios(&self) -> Vec<f64> {
        self.norms
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }

    /// Least-squares slope of `log ‖h_k‖` against k, as a ratio; `None`
    /// when fewer than two orders are nonzero.
    pub fn fitted_growth(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .norms
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0.0)
            .map(|(k, &n)| (k as f64, n.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some((sxy / sxx).exp())
    }

    /// `Σ_{k≤K} δ^k h_k`
    pub fn partial_sum(&self, delta: C, order: usize) -> Vec<C> {
        let n = self.h[0].len();
        let mut s = vec![C::new(0.0, 0.0); n];
        let mut p = C::new(1.0, 0.0);
        for hk in self.h.iter().take(order + 1) {
            for (si, &v) in s.iter_mut().zip(hk) {
                *si += p * v;
            }
            p *= delta;
        }
        s
    }
}

/// Factored solvers plus the growing state.
pub struct Cascade<'g> {
    geo: &'g CascadeGeometry<'g>,
    neumann: NeumannSolver<'g>,
    dirichlet: DirichletSolver<'g>,
    state: CascadeState,
}

impl<'g> Cascade<'g> {
    pub fn new(geo: &'g CascadeGeometry<'g>) -> Result<Self> {
        let neumann = NeumannSolver::new(&geo.core)?;
        let dirichlet = DirichletSolver::new(&geo.shell)?;
        let psi = psi_with(geo, &dirichlet)?;
        Ok(Cascade {
            geo,
            neumann,
            dirichlet,
            state: CascadeState {
                psi,
                h: vec![],
                c: vec![],
                norms: vec![],
                outer_flux_defects: vec![],
                inclusion_means: vec![],
                interface_jumps: vec![],
            },
        })
    }

    pub fn state(&self) -> &CascadeState {
        &self.state
    }

    pub fn into_state(self) -> CascadeState {
        self.state
    }

    /// Sum of the moduli of the per-entry terms of the interface residual.
    fn residual_scale(&self, f_prev: Option<&[[f64; 2]]>) -> Result<f64> {
        let geo = self.geo;
        let interface = geo.core.role_nodes(BoundaryTag::Interface);
        let parents: Vec<usize> = interface.iter().map(|&i| geo.core.to_parent()[i]).collect();
        let mut on_interface = vec![false; geo.mesh.vertices().len()];
        for &p in &parents {
            on_interface[p] = true;
        }
        let mut s = 0.0;
        if let Some(h) = self.state.h.last() {
            for &p in &parents {
                s += geo
                    .forms
                    .a_s
                    .row(p)
                    .map(|(j, a)| (a * h[j]).abs())
                    .sum::<f64>();
            }
        }
        if let Some(f) = f_prev {
            for (t, tri) in geo.mesh.triangles().iter().enumerate() {
                if tri.region != Region::Shell || !tri.v.iter().any(|&i| on_interface[i]) {
                    continue;
                }
                let e = Element::new(tri.v.map(|i| geo.mesh.vertices()[i]));
                let load = e.divergence_load(f[t]);
                for (k, &i) in tri.v.iter().enumerate() {
                    if on_interface[i] {
                        s += load[k].abs();
                    }
                }
            }
        }
        Ok(s)
    }

    /// Next order `K = state.h.len()`, driven by the interface residual of
    /// `h_{K−1}` and by `F_{K−1}`, `F_K`.
    pub fn step(&mut self, field: &DrivingField) -> Result<()> {
        let geo = self.geo;
        let k = self.state.h.len();
        let n = geo.mesh.vertices().len();
        let f_k = field.coeff(k);
        let f_prev = k.checked_sub(1).and_then(|j| field.coeff(j));

        // Interface residual of the previous order's shell part.
        let mut r = geo.region_load(f_prev, Region::Shell)?;
        if let Some(h_prev) = self.state.h.last() {
            for (ri, a) in r.iter_mut().zip(geo.forms.a_s.mul_vec(h_prev)) {
                *ri += a;
            }
        }
        let g: Vec<f64> = geo.core.restrict(&r).iter().map(|x| -x).collect();
        let scale = self.residual_scale(f_prev)?;
        let core_field = restrict_field(&geo.core, f_k);
        let inner = self
            .neumann
            .solve_scaled(
                &FluxData::NodalLoad(g),
                core_field.as_deref(),
                COMPATIBILITY_TOL,
                scale,
            )
            .map_err(|e| match e {
                Error::Compatibility {
                    imbalance,
                    tolerance,
                    ..
                } => Error::Compatibility {
                    imbalance,
                    tolerance,
                    context: format!(" in the inclusion solve at order {k}"),
                },
                e => e,
            })?;
        let h_d = geo.core.extend(&inner.h.values, &vec![0.0; n]);

        let trace = geo.shell.restrict(&h_d);
        let shell_field = restrict_field(&geo.shell, f_k);
        let outer = self.dirichlet.solve(
            &[
                (BoundaryTag::Interface, BoundaryValues::Nodal(trace.clone())),
                (BoundaryTag::Outer, BoundaryValues::Constant(0.0)),
            ],
            shell_field.as_deref(),
        )?;
        let hring = &outer.h.values;
        let flux = self
            .dirichlet
            .flux(hring, shell_field.as_deref(), BoundaryTag::Outer)?;
        let c_k = -flux / self.state.psi.energy;

        let jump = geo
            .shell
            .role_nodes(BoundaryTag::Interface)
            .iter()
            .map(|&i| (hring[i] - trace[i]).abs())
            .fold(0.0, f64::max);
        let psi_child = geo.shell.restrict(&self.state.psi.values);
        let shell_vals: Vec<f64> = hring
            .iter()
            .zip(&psi_child)
            .map(|(h, p)| h + c_k * p)
            .collect();
        let h_k = geo.shell.extend(&shell_vals, &h_d);

        let remeasured = boundary_flux(
            &geo.shell,
            &geo.shell.restrict(&h_k),
            shell_field.as_deref(),
            BoundaryTag::Outer,
        )?;
        let mean = geo.forms.m_d.form(&vec![1.0; n], &h_k) / geo.forms.inclusion_area;
        let norm = geo.forms.h1_norm(&h_k, RegionSelector::All);

        let st = &mut self.state;
        st.h.push(h_k);
        st.c.push(c_k);
        st.norms.push(norm);
        st.outer_flux_defects.push(remeasured.abs());
        st.inclusion_means.push(mean);
        st.interface_jumps.push(jump);
        Ok(())
    }
}

/// `(h_0, c_0)`
pub fn cascade_base(geo: &CascadeGeometry, field: &DrivingField) -> Result<(Vec<f64>, f64)> {
    let mut c = Cascade::new(geo)?;
    c.step(field)?;
    let st = c.into_state();
    Ok((st.h[0].clone(), st.c[0]))
}

/// Orders `0..=max_order`.
pub fn run_cascade(
    geo: &CascadeGeometry,
    field: &DrivingField,
    max_order: usize,
) -> Result<CascadeState> {
    let mut c = Cascade::new(geo)?;
    for _ in 0..=max_order {
        c.step(field)?;
    }
    Ok(c.into_state())
}

#[derive(Debug, Clone)]
pub struct DirectSolution {
    pub h: Vec<C>,
    /// Common value on the outer boundary.
    pub outer_value: C,
    /// Relative residual of the merged system.
    pub residual: f64,
    /// `|∮_∂Ω (F_δ + ∇h_δ)·ν|`
    pub outer_flux_defect: f64,
    pub inclusion_mean: C,
}

/// Single solve of `∫ ε_δ (F_δ + ∇h)·∇φ = 0` over the space of functions
/// constant on the outer boundary, normalized by `∫_D h = 0`.
pub fn direct_projection(
    geo: &CascadeGeometry,
    field: &DrivingField,
    delta: C,
) -> Result<DirectSolution> {
    if delta.norm() == 0.0 {
        return Err(Error::Invalid(
            "the direct projection needs delta != 0".into(),
        ));
    }
    let forms = &geo.forms;
    let n = forms.dim();
    let mut b_d = vec![C::new(0.0, 0.0); n];
    let mut b_s = vec![C::new(0.0, 0.0); n];
    let mut p = C::new(1.0, 0.0);
    for k in 0..field.order_count() {
        let f = field.coeff(k);
        for (acc, v) in b_d.iter_mut().zip(geo.region_load(f, Region::Inclusion)?) {
            *acc += p * v;
        }
        for (acc, v) in b_s.iter_mut().zip(geo.region_load(f, Region::Shell)?) {
            *acc += p * v;
        }
        p *= delta;
    }
    let b: Vec<C> = b_d.iter().zip(&b_s).map(|(d, s)| d + delta * s).collect();

    // Merge the outer nodes into one unknown and pin one inclusion node.
    let mut is_outer = vec![false; n];
    for &i in &forms.outer_nodes {
        is_outer[i] = true;
    }
    let pin = forms.inclusion_nodes[0];
    let mut dof = vec![usize::MAX; n];
    let mut nd = 0;
    for i in 0..n {
        if !is_outer[i] && i != pin {
            dof[i] = nd;
            nd += 1;
        }
    }
    let merged = nd;
    nd += 1;
    for &i in &forms.outer_nodes {
        dof[i] = merged;
    }
    let k = forms
        .a_d
        .to_complex()
        .lin_comb(C::new(1.0, 0.0), &forms.a_s.to_complex(), delta)?;
    let mut trip = Vec::with_capacity(k.nnz());
    for i in 0..n {
        if i == pin {
            continue;
        }
        for (j, v) in k.row(i) {
            if j != pin {
                trip.push((dof[i], dof[j], v));
            }
        }
    }
    let kr = SparseMatrix::from_triplets(nd, nd, &trip)?;
    let mut rhs = vec![C::new(0.0, 0.0); nd];
    for i in 0..n {
        if i != pin {
            rhs[dof[i]] -= b[i];
        }
    }
    let lu = SparseLu::factor(&kr).map_err(|e| match e {
        Error::Singular { .. } => Error::DiscreteResonance {
            delta: delta.to_string(),
        },
        e => e,
    })?;
    let x = lu.solve(&rhs);
    let mut h: Vec<C> = (0..n)
        .map(|i| {
            if i == pin {
                C::new(0.0, 0.0)
            } else {
                x[dof[i]]
            }
        })
        .collect();
    let one = vec![C::new(1.0, 0.0); n];
    let mean = forms.m_d.to_complex().form(&one, &h) / forms.inclusion_area;
    for v in &mut h {
        *v -= mean;
    }

    // Residual of every merged equation, the pinned one included.
    let kh = k.mul_vec(&h);
    let mut res = vec![C::new(0.0, 0.0); nd + 1];
    let mut scale = vec![C::new(0.0, 0.0); nd + 1];
    for i in 0..n {
        let row = if i == pin { nd } else { dof[i] };
        res[row] += kh[i] + b[i];
        scale[row] += b[i];
    }
    let s = norm2(&scale);
    let residual = norm2(&res) / if s > 0.0 { s } else { 1.0 };
    let ash = forms.a_s.to_complex().mul_vec(&h);
    let outer_flux: C = forms.outer_nodes.iter().map(|&i| ash[i] + b_s[i]).sum();
    let outer_value = h[forms.outer_nodes[0]];
    let inclusion_mean = forms.m_d.to_complex().form(&one, &h) / forms.inclusion_area;
    Ok(DirectSolution {
        h,
        outer_value,
        residual,
        outer_flux_defect: outer_flux.norm(),
        inclusion_mean,
    })
}

#[derive(Debug, Clone)]
pub struct SeriesComparison {
    /// `e_K`, `K = 0..=max_order`.
    pub errors: Vec<f64>,
    pub state: CascadeState,
    pub direct: DirectSolution,
}

impl SeriesComparison {
    /// `e_{K+1} / e_K`
    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// `e_K = ‖Σ_{k≤K} δ^k h_k − h_δ‖_{H¹} / ‖h_δ‖_{H¹}`
pub fn series_vs_direct(
    geo: &CascadeGeometry,
    field: &DrivingField,
    delta: C,
    max_order: usize,
) -> Result<SeriesComparison> {
    let state = run_cascade(geo, field, max_order)?;
    let direct = direct_projection(geo, field, delta)?;
    let denom = geo.forms.h1_norm(&direct.h, RegionSelector::All);
    let errors = (0..=max_order)
        .map(|k| {
            let s = state.partial_sum(delta, k);
            let d: Vec<C> = s.iter().zip(&direct.h).map(|(a, b)| a - b).collect();
            geo.forms.h1_norm(&d, RegionSelector::All) / denom
        })
        .collect();
    Ok(SeriesComparison {
        errors,
        state,
        direct,
    })
}
