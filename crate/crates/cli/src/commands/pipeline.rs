use std::path::PathBuf;

use clap::{Args, Subcommand};
use lrtk::pipeline::{build_file, validate_dataset};
use serde::Serialize;
use serde_json::json;

use crate::context::Context;

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineCommand {
    /// Build every dataset a manifest describes.
    ///
    /// Example: lrtk pipeline build --manifest exp.toml --seed 3
    Build(BuildArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    /// TOML manifest; relative paths in it are taken from its directory.
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,
    /// Re-read every written dataset and check its invariants.
    #[arg(long)]
    check: bool,
}

impl PipelineCommand {
    pub fn name(&self) -> &'static str {
        "build"
    }

    pub fn run(&self, ctx: &mut Context) -> anyhow::Result<()> {
        let PipelineCommand::Build(a) = self;
        ctx.read_input(Some(&a.manifest))?;
        let report = build_file(&a.manifest, ctx.explicit_seed())?;
        ctx.set_resolved_seed(report.seed);
        for f in &report.files {
            ctx.note_output(f)?;
        }
        if a.check {
            for d in &report.datasets {
                validate_dataset(&report.output_dir, &d.name)?;
            }
        }
        ctx.set_default_record(report.output_dir.join("run.json"));
        ctx.stat(json!({
            "stage": "pipeline",
            "output_dir": report.output_dir,
            "datasets": report.datasets.len(),
            "pairs": report.datasets.iter().map(|d| d.pairs).sum::<usize>(),
            "checked": a.check,
        }));
        Ok(())
    }
}
