use std::path::PathBuf;

use clap::{Args, Subcommand};
use enz_core::mie::{
    dispersion_sweep, electrostatic_mode, evaluate_fields, nonelectrostatic_mode, sample_points,
    write_mode, write_samples_csv, DispersionFamily, MatchingReadings, MieMode,
};
use enz_core::specfun::bessel_zeros;

use super::{at_least, C};
use crate::config::{List, Settings};
use crate::output::{emit, warn, Cell, Table};
use crate::Failure;

#[derive(Subcommand)]
pub enum MieCommand {
    /// Mode with tangential trace V and a gradient shell field.
    Electrostatic(ElectrostaticArgs),
    /// Mode with tangential trace U and a nonzero shell magnetic field.
    Nonelectrostatic(NonelectrostaticArgs),
    /// Roots of the concentric-sphere determinant for a list of δ.
    Dispersion(DispersionArgs),
}

#[derive(Args)]
pub struct FieldOut {
    /// Random field samples written with `--fields-out`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "fields-out")]
    pub fields_out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct ElectrostaticArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i32>,
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long = "R")]
    pub r_outer: Option<f64>,
    #[command(flatten)]
    pub fields: FieldOut,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct NonelectrostaticArgs {
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<i32>,
    /// Index of the interval between consecutive zeros of j_p.
    #[arg(long)]
    pub interval: Option<usize>,
    #[arg(long = "R")]
    pub r_outer: Option<f64>,
    #[command(flatten)]
    pub fields: FieldOut,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DispersionArgs {
    /// `radial` (tends to the electrostatic modes) or `tangential`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "R")]
    pub r_outer: Option<f64>,
    #[arg(long)]
    pub deltas: Option<List<C>>,
    /// Newton start; defaults to the first zero of j_n.
    #[arg(long = "seed-k")]
    pub seed_k: Option<C>,
    /// Start each δ from the previous root.
    #[arg(long = "continue")]
    pub continue_seed: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct FieldRequest {
    samples: usize,
    path: Option<PathBuf>,
    seed: u64,
}

fn field_request(f: FieldOut, s: &mut Settings) -> Result<FieldRequest, Failure> {
    Ok(FieldRequest {
        samples: s.get("samples", f.samples, 32)?,
        path: s.get_opt("fields-out", f.fields_out)?,
        seed: s.get("seed", f.seed, 1)?,
    })
}

fn finish_mode(mode: &MieMode, fields: FieldRequest, out: Option<PathBuf>) -> Result<(), Failure> {
    if let Some(p) = &fields.path {
        let pts = sample_points(mode.r_outer, fields.samples, 1e-3, fields.seed);
        let samples = evaluate_fields(mode, &pts)?;
        emit(Some(p), &write_samples_csv(&samples))?;
    }
    emit(out.as_deref(), &write_mode(mode))
}

pub fn run(cmd: MieCommand, mut s: Settings) -> Result<(), Failure> {
    match cmd {
        MieCommand::Electrostatic(a) => {
            let n = s.get("n", a.n, 1)?;
            let m = s.get("m", a.m, 0)?;
            let root = s.get("root", a.root, 1)?;
            let r = s.get("R", a.r_outer, 2.0)?;
            let fields = field_request(a.fields, &mut s)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            s.finish()?;
            let mode = electrostatic_mode(n, m, root, r)?;
            finish_mode(&mode, fields, out)
        }
        MieCommand::Nonelectrostatic(a) => {
            let p = s.get("p", a.p, 1)?;
            let q = s.get("q", a.q, 0)?;
            let interval = s.get("interval", a.interval, 1)?;
            let r = s.get("R", a.r_outer, 2.0)?;
            let fields = field_request(a.fields, &mut s)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            s.finish()?;
            let mode = nonelectrostatic_mode(p, q, r, interval)?;
            let readings = MatchingReadings::new(p, mode.coeffs);
            let res = readings.residuals(p, mode.k)?;
            eprintln!(
                "matching constant: field {:.16e} (residual {:.3e}), unnormalized {:.16e} (residual {:.3e}), single-D {:.16e} (residual {:.3e})",
                readings.field, res[0], readings.unnormalized, res[1], readings.single_d, res[2]
            );
            finish_mode(&mode, fields, out)
        }
        MieCommand::Dispersion(a) => {
            let family = match s.get("family", a.family, "radial".to_string())?.as_str() {
                "radial" => DispersionFamily::RadialE,
                "tangential" => DispersionFamily::TangentialE,
                f => {
                    return Err(Failure::Validation(format!(
                        "unknown family `{f}` (radial or tangential)"
                    )))
                }
            };
            let n = at_least("n", s.get("n", a.n, 1)?, 1)?;
            let r = s.get("R", a.r_outer, 2.0)?;
            let deltas = s.get("deltas", a.deltas, List(vec![C::new(1e-3, 0.0)]))?;
            let seed: Option<C> = s.get_opt("seed-k", a.seed_k)?;
            let cont = s.get("continue", a.continue_seed, true)?;
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            s.finish()?;
            if deltas.0.is_empty() {
                return Err(Failure::Validation(
                    "--deltas needs at least one value".into(),
                ));
            }
            let seed = match seed {
                Some(k) => k,
                None => C::new(bessel_zeros(n, 1)?[0], 0.0),
            };
            let roots = dispersion_sweep(family, n, r, &deltas.0, seed, cont)?;
            let mut t = Table::new(
                "dispersion",
                &[
                    "delta_re",
                    "delta_im",
                    "k_re",
                    "k_im",
                    "lambda_re",
                    "lambda_im",
                    "iterations",
                    "residual",
                ],
            );
            for root in &roots {
                for w in &root.warnings {
                    warn(w);
                }
                t.push(vec![
                    root.delta.re.into(),
                    root.delta.im.into(),
                    root.k.re.into(),
                    root.k.im.into(),
                    root.lambda.re.into(),
                    root.lambda.im.into(),
                    Cell::from(root.iterations),
                    root.residual.into(),
                ]);
            }
            emit(out.as_deref(), &t.render())
        }
    }
}
