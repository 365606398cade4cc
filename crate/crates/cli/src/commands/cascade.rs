use std::path::PathBuf;

use clap::Args;
use enz_core::cascade::{load_field, series_vs_direct, CascadeGeometry, DrivingField};

use super::{MeshArgs, C};
use crate::config::Settings;
use crate::output::{emit, Cell, Table};
use crate::Failure;

#[derive(Args)]
pub struct CascadeArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Highest order K.
    #[arg(long)]
    pub orders: Option<usize>,
    /// δ of the direct comparison solve.
    #[arg(long)]
    pub delta: Option<C>,
    /// Constant driving field `F_0 = (fx, fy)`.
    #[arg(long = "field-x", allow_negative_numbers = true)]
    pub field_x: Option<f64>,
    #[arg(long = "field-y", allow_negative_numbers = true)]
    pub field_y: Option<f64>,
    /// Per-triangle field file, overriding the constant field.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: CascadeArgs, mut s: Settings) -> Result<(), Failure> {
    let orders = s.get("orders", a.orders, 6)?;
    let delta = s.get("delta", a.delta, C::new(0.05, 0.0))?;
    if delta.norm() == 0.0 {
        return Err(Failure::Validation(
            "delta must be nonzero for the direct comparison".into(),
        ));
    }
    let fx = s.get("field-x", a.field_x, 1.0)?;
    let fy = s.get("field-y", a.field_y, 0.0)?;
    let field_path: Option<PathBuf> = s.get_opt("field", a.field)?;
    let out: Option<PathBuf> = s.get_opt("out", a.out)?;
    let mesh = a.mesh.build(&mut s, 8)?;
    s.finish()?;

    let field = match field_path {
        Some(p) => load_field(&p, &mesh)?,
        None => DrivingField::constant(&mesh, [fx, fy], 1)?,
    };
    let geo = CascadeGeometry::new(&mesh)?;
    let cmp = series_vs_direct(&geo, &field, delta, orders)?;
    let st = &cmp.state;
    let mut t = Table::new(
        "cascade",
        &[
            "order",
            "c",
            "h1_norm",
            "outer_flux_defect",
            "inclusion_mean",
            "series_error",
        ],
    );
    for k in 0..=orders {
        t.push(vec![
            Cell::from(k),
            st.c[k].into(),
            st.norms[k].into(),
            st.outer_flux_defects[k].into(),
            st.inclusion_means[k].into(),
            cmp.errors[k].into(),
        ]);
    }
    emit(out.as_deref(), &t.render())
}
