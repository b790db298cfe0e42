use amplituhedra::amplituhedron::{hat_map, AmplituhedronSetup};
use amplituhedra::embeddings::{embed_point, EmbeddingError};
use amplituhedra::tnn::{check_tnn, TnnPoint};
use amplituhedra::RationalMatrix;
use clap::Arg;

use super::{file_arg, Command, Context};
use crate::error::CliError;
use crate::report::Report;

fn read_inputs(ctx: &mut Context) -> Result<(AmplituhedronSetup, RationalMatrix, bool), CliError> {
    let setup: AmplituhedronSetup = ctx.read("setup")?;
    let point: RationalMatrix = ctx.read("point")?;
    if point.shape() != (setup.k(), setup.n()) {
        return Err(CliError::usage(format!(
            "point is {}x{}, setup needs {}x{}",
            point.rows(),
            point.cols(),
            setup.k(),
            setup.n()
        )));
    }
    let tnn = check_tnn(&point).map_err(CliError::usage)?.is_tnn;
    Ok((setup, point, tnn))
}

pub struct Map;

impl Command for Map {
    fn name(&self) -> &'static str {
        "map"
    }

    fn about(&self) -> &'static str {
        "Apply V -> V·Zᵀ to a representative"
    }

    fn args(&self) -> Vec<Arg> {
        vec![file_arg("setup", "Setup JSON file"), file_arg("point", "Matrix JSON file")]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let (setup, point, tnn) = read_inputs(ctx)?;
        let mapped = hat_map(&setup, &point).map_err(CliError::usage)?;
        ctx.report(self.name())
            .verdict("pointIsTnn", tnn)
            .verdict("imageFullRank", mapped.image_rank == setup.k())
            .counter("imageRank", mapped.image_rank as u64)
            .emit(ctx.out(), "image.json", &mapped)
    }
}

pub struct Embed;

impl Command for Embed {
    fn name(&self) -> &'static str {
        "embed"
    }

    fn about(&self) -> &'static str {
        "Plücker then Veronese image of a mapped point"
    }

    fn args(&self) -> Vec<Arg> {
        vec![file_arg("setup", "Setup JSON file"), file_arg("point", "Matrix JSON file")]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let (setup, point, tnn) = read_inputs(ctx)?;
        let report = ctx.report(self.name()).verdict("pointIsTnn", tnn);
        if !tnn {
            return Ok(report.message("point is not totally nonnegative"));
        }
        let point = TnnPoint::new(point).map_err(CliError::usage)?;
        match embed_point(&setup, &point) {
            Ok(v) => report
                .verdict("wellDefined", true)
                .verdict("rankOneProjection", v.is_symmetric() && v.is_idempotent() && v.rank() == 1)
                .counter("dimension", v.matrix().rows() as u64)
                .emit(ctx.out(), "veronese.json", &v),
            Err(e @ EmbeddingError::NotWellDefined { .. }) => {
                Ok(report.verdict("wellDefined", false).message(e.to_string()))
            }
            Err(e) => Err(CliError::usage(e)),
        }
    }
}
