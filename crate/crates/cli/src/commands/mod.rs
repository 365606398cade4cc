pub mod cascade;
pub mod eig;
pub mod invariance;
pub mod mesh;
pub mod mie;
pub mod taylor;

use std::path::PathBuf;

use clap::Args;
use enz_core::fem::{assemble, AssembledForms};
use enz_core::mesh2d::{generate_disk_in_disk, generate_square_with_disk, load_mesh, Mesh};
use num_complex::Complex64;

use crate::config::Settings;
use crate::Failure;

pub type C = Complex64;

/// Either `--mesh FILE` or a generated geometry.
#[derive(Args, Debug, Clone, Default)]
pub struct MeshArgs {
    /// Mesh file in the `enzmesh` text format.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// `disk` (outer radius) or `square` (outer half side).
    #[arg(long)]
    pub geometry: Option<String>,
    /// Outer radius or half side.
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long = "rings-core")]
    pub rings_core: Option<usize>,
    #[arg(long = "rings-shell")]
    pub rings_shell: Option<usize>,
}

pub fn generate(
    geometry: &str,
    size: f64,
    rings_core: usize,
    rings_shell: usize,
) -> Result<Mesh, Failure> {
    Ok(match geometry {
        "disk" => generate_disk_in_disk(size, rings_core, rings_shell)?,
        "square" => generate_square_with_disk(size, rings_core, rings_shell)?,
        g => {
            return Err(Failure::Validation(format!(
                "unknown geometry `{g}` (disk or square)"
            )))
        }
    })
}

impl MeshArgs {
    pub fn build(self, s: &mut Settings, rings: usize) -> Result<Mesh, Failure> {
        let path: Option<PathBuf> = s.get_opt("mesh", self.mesh)?;
        let geometry = s.get("geometry", self.geometry, "disk".to_string())?;
        let size = s.get("size", self.size, 2.0)?;
        let rc = s.get("rings-core", self.rings_core, rings)?;
        let rs = s.get("rings-shell", self.rings_shell, rings)?;
        match path {
            Some(p) => Ok(load_mesh(&p)?),
            None => generate(&geometry, size, rc, rs),
        }
    }
}

pub fn forms(mesh: &Mesh) -> Result<AssembledForms, Failure> {
    Ok(assemble(mesh)?)
}

pub fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Validation(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

pub fn at_least(name: &str, x: usize, min: usize) -> Result<usize, Failure> {
    if x >= min {
        Ok(x)
    } else {
        Err(Failure::Validation(format!(
            "{name} must be at least {min}, got {x}"
        )))
    }
}
