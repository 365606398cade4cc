use std::path::PathBuf;

use clap::Args;
use enz_core::eig::{circle_path, delta_spectrum_with, track_branch, TrackOptions};
use enz_core::perturb::{analyticity_report_with, CircleSamples, CLOSURE_TOL};

use super::eig::{arnoldi, radial_limit};
use super::{at_least, forms, positive, MeshArgs, C};
use crate::config::{List, Settings};
use crate::output::{emit, warn};
use crate::Failure;

#[derive(Args)]
pub struct TaylorArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Circle radius in the δ plane.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Samples on the circle, a power of two.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Radial steps from δ = 0 out to the circle.
    #[arg(long = "radial-steps")]
    pub radial_steps: Option<usize>,
    /// Branch value at δ = 0; defaults to the radial limit eigenvalue.
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// δ values checked against the series by direct solves.
    #[arg(long = "held-out")]
    pub held_out: Option<List<C>>,
    /// Real δ values for the reality check.
    #[arg(long = "real-axis")]
    pub real_axis: Option<List<f64>>,
    #[arg(long = "closure-tol")]
    pub closure_tol: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: TaylorArgs, mut s: Settings) -> Result<(), Failure> {
    let radius = s.get("radius", a.radius, 0.05)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Failure::Validation(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let n = at_least("samples", s.get("samples", a.samples, 32)?, 4)?;
    if !n.is_power_of_two() {
        return Err(Failure::Validation(format!(
            "samples must be a power of two, got {n}"
        )));
    }
    let order = s.get("order", a.order, 8)?;
    if order > n / 4 {
        return Err(Failure::Validation(format!(
            "order must not exceed samples/4 = {}",
            n / 4
        )));
    }
    let radial = at_least("radial-steps", s.get("radial-steps", a.radial_steps, 2)?, 1)?;
    let lambda0: Option<f64> = s.get_opt("lambda0", a.lambda0)?;
    let held = s.get(
        "held-out",
        a.held_out,
        List(vec![C::new(radius / 2.0, 0.0)]),
    )?;
    let real = s.get("real-axis", a.real_axis, List(vec![0.02, 0.05, 0.1]))?;
    let closure_tol = positive(
        "closure-tol",
        s.get("closure-tol", a.closure_tol, CLOSURE_TOL)?,
    )?;
    let tol = positive("tol", s.get("tol", a.tol, 1e-8)?)?;
    let out: Option<PathBuf> = s.get_opt("out", a.out)?;
    let mesh = a.mesh.build(&mut s, 6)?;
    s.finish()?;
    for d in &held.0 {
        if d.norm() >= radius {
            return Err(Failure::Validation(format!(
                "held-out delta {d} lies outside the circle"
            )));
        }
    }

    let f = forms(&mesh)?;
    let l0 = match lambda0 {
        Some(l) => l,
        None => radial_limit(&f, 6, tol)?.0,
    };
    let opts = TrackOptions {
        arnoldi: arnoldi(6, tol),
        ..Default::default()
    };
    let (path, start) = circle_path(radius, n, radial);
    let branch = track_branch(&f, l0, &path, &opts)?;
    for step in &branch.steps {
        for w in &step.warnings {
            warn(w);
        }
    }
    let samples = CircleSamples::from_branch(&branch, start)?;
    let held_pairs = held
        .0
        .iter()
        .map(|&d| {
            let b = track_branch(&f, l0, &[C::new(0.0, 0.0), d / 2.0, d], &opts)?;
            Ok((d, b.steps[2].lambda))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let real_lambdas = real
        .0
        .iter()
        .map(|&d| {
            let sp = delta_spectrum_with(&f, C::new(d, 0.0), C::new(l0, 0.0), &arnoldi(1, tol))?;
            for w in &sp.warnings {
                warn(w);
            }
            Ok(sp.pairs[0].lambda)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let report = analyticity_report_with(&samples, order, &held_pairs, &real_lambdas, closure_tol)?;
    emit(out.as_deref(), &(report.to_json() + "\n"))
}
