use amplituhedra::amplituhedron::{build_z0, SetupError};
use clap::{value_parser, Arg};

use super::{count_arg, Command, Context};
use crate::error::CliError;
use crate::report::Report;

pub struct Z0;

impl Command for Z0 {
    fn name(&self) -> &'static str {
        "z0"
    }

    fn about(&self) -> &'static str {
        "Build and verify the cyclically symmetric Z0 for n = k+m+1"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            count_arg("k", true, "Rows of the points"),
            count_arg("m", true, "Even codimension parameter"),
            Arg::new("precision")
                .long("precision")
                .value_parser(value_parser!(u32))
                .default_value("8")
                .help("Decimal digits for rounding the entries"),
        ]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let k: usize = ctx.param("k");
        let m: usize = ctx.param("m");
        let precision: u32 = ctx.param("precision");
        match build_z0(k, m, precision) {
            Ok(setup) => ctx
                .report(self.name())
                .verdict("allMinorsPositive", setup.all_minors_positive())
                .verdict("kernelAlternates", setup.kernel_alternates())
                .counter("n", setup.n() as u64)
                .emit(ctx.out(), "setup.json", &setup),
            Err(e @ SetupError::Construction(_)) => {
                Ok(ctx.report(self.name()).verdict("allMinorsPositive", false).message(e.to_string()))
            }
            Err(e) => Err(CliError::usage(e)),
        }
    }
}
