use std::path::PathBuf;

use clap::{Args, Subcommand};
use enz_core::eig::{
    delta_spectrum_with, discrete_k0, interface_variation, limit_spectrum_with, Spectrum,
};
use enz_core::fem::AssembledForms;
use enz_core::linalg::ArnoldiOptions;
use rayon::prelude::*;

use super::{at_least, forms, positive, MeshArgs, C};
use crate::config::{List, Settings};
use crate::output::{emit, warn, Cell, Table};
use crate::Failure;

/// Modes whose interface trace varies less than this are taken as radial.
pub const RADIAL_VARIATION: f64 = 1e-2;

#[derive(Subcommand)]
pub enum EigCommand {
    /// Smallest nonzero eigenvalues of the δ = 0 pencil.
    Limit(LimitArgs),
    /// Eigenvalues nearest a target for a list of δ.
    Sweep(SweepArgs),
    /// Reciprocals of the discrete compact-operator spectrum.
    K0(LimitArgs),
}

#[derive(Args)]
pub struct LimitArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long)]
    pub count: Option<usize>,
    /// Arnoldi residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Comma-separated δ values, complex as `a+bi`.
    #[arg(long)]
    pub deltas: Option<List<C>>,
    /// Shift; defaults to the radial limit eigenvalue.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn arnoldi(count: usize, tol: f64) -> ArnoldiOptions {
    ArnoldiOptions {
        count,
        tol,
        ..Default::default()
    }
}

/// First limit eigenvalue with a radial interface trace.
pub fn radial_limit(
    f: &AssembledForms,
    count: usize,
    tol: f64,
) -> Result<(f64, Spectrum), Failure> {
    let spec = limit_spectrum_with(f, &arnoldi(count, tol))?;
    let l0 = spec
        .pairs
        .iter()
        .find(|p| interface_variation(f, &p.vector) < RADIAL_VARIATION)
        .map(|p| p.lambda.re)
        .ok_or_else(|| {
            Failure::Validation(format!(
                "no radial mode among the {count} smallest limit eigenvalues; raise --count"
            ))
        })?;
    Ok((l0, spec))
}

pub fn run(cmd: EigCommand, mut s: Settings) -> Result<(), Failure> {
    match cmd {
        EigCommand::Limit(a) => {
            let count = at_least("count", s.get("count", a.count, 6)?, 1)?;
            let tol = positive("tol", s.get("tol", a.tol, 1e-8)?)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            let mesh = a.mesh.build(&mut s, 16)?;
            s.finish()?;
            let f = forms(&mesh)?;
            let spec = limit_spectrum_with(&f, &arnoldi(count, tol))?;
            let mut t = Table::new(
                "limit_spectrum",
                &["index", "lambda", "interface_variation", "residual"],
            );
            for (i, p) in spec.pairs.iter().enumerate() {
                t.push(vec![
                    Cell::from(i + 1),
                    p.lambda.re.into(),
                    interface_variation(&f, &p.vector).into(),
                    p.residual.into(),
                ]);
            }
            emit(out.as_deref(), &t.render())
        }
        EigCommand::Sweep(a) => {
            let deltas = s.get("deltas", a.deltas, List(vec![]))?;
            if deltas.0.is_empty() {
                return Err(Failure::Validation(
                    "--deltas needs at least one value".into(),
                ));
            }
            let count = at_least("count", s.get("count", a.count, 1)?, 1)?;
            let tol = positive("tol", s.get("tol", a.tol, 1e-8)?)?;
            let target: Option<f64> = s.get_opt("target", a.target)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            let mesh = a.mesh.build(&mut s, 16)?;
            s.finish()?;
            let f = forms(&mesh)?;
            let target = match target {
                Some(t) => t,
                None => radial_limit(&f, 6, tol)?.0,
            };
            let opts = arnoldi(count, tol);
            let spectra = deltas
                .0
                .par_iter()
                .map(|&d| delta_spectrum_with(&f, d, C::new(target, 0.0), &opts))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(
                "delta_sweep",
                &[
                    "delta_re",
                    "delta_im",
                    "index",
                    "lambda_re",
                    "lambda_im",
                    "residual",
                ],
            );
            for sp in &spectra {
                for w in &sp.warnings {
                    warn(w);
                }
                for (i, p) in sp.pairs.iter().enumerate() {
                    t.push(vec![
                        sp.delta.re.into(),
                        sp.delta.im.into(),
                        (i + 1).into(),
                        p.lambda.re.into(),
                        p.lambda.im.into(),
                        p.residual.into(),
                    ]);
                }
            }
            emit(out.as_deref(), &t.render())
        }
        EigCommand::K0(a) => {
            let count = at_least("count", s.get("count", a.count, 6)?, 1)?;
            let tol = positive("tol", s.get("tol", a.tol, 1e-8)?)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            let mesh = a.mesh.build(&mut s, 4)?;
            s.finish()?;
            let f = forms(&mesh)?;
            let k0 = discrete_k0(&f)?;
            let spec = limit_spectrum_with(&f, &arnoldi(count, tol))?;
            let mut t = Table::new(
                "k0_check",
                &["index", "lambda", "inverse_rho", "relative_difference"],
            );
            for (i, (p, rho)) in spec.pairs.iter().zip(&k0.rho).enumerate() {
                let inv = 1.0 / rho;
                let l = p.lambda.re;
                t.push(vec![
                    (i + 1).into(),
                    l.into(),
                    inv.into(),
                    ((l - inv).abs() / l).into(),
                ]);
            }
            emit(out.as_deref(), &t.render())
        }
    }
}
