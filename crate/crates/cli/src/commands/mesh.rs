use std::path::PathBuf;

use clap::{Args, Subcommand};
use enz_core::eig::validity_radius;
use enz_core::mesh2d::{write_mesh, BoundaryTag, Region};

use super::{forms, MeshArgs};
use crate::config::Settings;
use crate::output::emit;
use crate::Failure;

#[derive(Subcommand)]
pub enum MeshCommand {
    /// Write a generated mesh.
    Gen(GenArgs),
    /// JSON summary of a mesh.
    Info(GenArgs),
}

#[derive(Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cmd: MeshCommand, mut s: Settings) -> Result<(), Failure> {
    match cmd {
        MeshCommand::Gen(a) => {
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            let mesh = a.mesh.build(&mut s, 16)?;
            s.finish()?;
            emit(out.as_deref(), &write_mesh(&mesh))
        }
        MeshCommand::Info(a) => {
            let out: Option<PathBuf> = s.get_opt("out", a.out)?;
            let mesh = a.mesh.build(&mut s, 16)?;
            s.finish()?;
            let f = forms(&mesh)?;
            let info = serde_json::json!({
                "vertices": mesh.vertices().len(),
                "triangles": mesh.triangles().len(),
                "inclusion_area": mesh.region_area(Region::Inclusion),
                "shell_area": mesh.region_area(Region::Shell),
                "interface_nodes": mesh.tagged_nodes(BoundaryTag::Interface).len(),
                "outer_nodes": mesh.tagged_nodes(BoundaryTag::Outer).len(),
                "validity_radius": validity_radius(&f),
            });
            let text = serde_json::to_string_pretty(&info).expect("plain data") + "\n";
            emit(out.as_deref(), &text)
        }
    }
}
