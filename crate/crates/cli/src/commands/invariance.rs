use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use super::eig::radial_limit;
use super::{at_least, forms, generate};
use crate::config::{List, Settings};
use crate::output::{emit, Cell, Table};
use crate::Failure;

#[derive(Args)]
pub struct InvarianceArgs {
    /// Shells as `geometry:size`, e.g. `disk:2,square:2`.
    #[arg(long)]
    pub shapes: Option<List<String>>,
    #[arg(long = "rings-core")]
    pub rings_core: Option<usize>,
    #[arg(long = "rings-shell")]
    pub rings_shell: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: InvarianceArgs, mut s: Settings) -> Result<(), Failure> {
    let default_shapes = ["disk:1.5", "disk:2", "disk:3", "square:1.5", "square:2"];
    let shapes = s.get(
        "shapes",
        a.shapes,
        List(default_shapes.iter().map(|x| x.to_string()).collect()),
    )?;
    let rc = at_least("rings-core", s.get("rings-core", a.rings_core, 12)?, 1)?;
    let rs = at_least("rings-shell", s.get("rings-shell", a.rings_shell, 12)?, 1)?;
    let count = at_least("count", s.get("count", a.count, 6)?, 1)?;
    let out: Option<PathBuf> = s.get_opt("out", a.out)?;
    s.finish()?;
    if shapes.0.is_empty() {
        return Err(Failure::Validation(
            "--shapes needs at least one entry".into(),
        ));
    }
    let parsed = shapes
        .0
        .iter()
        .map(|sh| {
            let (g, size) = sh
                .split_once(':')
                .ok_or_else(|| Failure::Validation(format!("shape `{sh}` is not geometry:size")))?;
            let size: f64 = size
                .parse()
                .map_err(|_| Failure::Validation(format!("invalid size in shape `{sh}`")))?;
            Ok((g.to_string(), size))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let rows = parsed
        .par_iter()
        .map(|(g, size)| {
            let mesh = generate(g, *size, rc, rs)?;
            let f = forms(&mesh)?;
            Ok(radial_limit(&f, count, 1e-8)?.0)
        })
        .collect::<Result<Vec<f64>, Failure>>()?;
    let mut t = Table::new(
        "invariance",
        &["geometry", "size", "lambda", "relative_spread"],
    );
    let first = rows[0];
    for ((g, size), l) in parsed.iter().zip(&rows) {
        t.push(vec![
            Cell::from(g.as_str()),
            (*size).into(),
            (*l).into(),
            ((l - first).abs() / first).into(),
        ]);
    }
    emit(out.as_deref(), &t.render())
}
