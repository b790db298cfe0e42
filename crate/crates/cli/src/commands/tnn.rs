use amplituhedra::linalg::binomial;
use amplituhedra::sampling::{random_tnn_point, trial_rng};
use amplituhedra::tnn::{check_tnn, check_totally_positive, in_closed_cell, PositroidCellSpec};
use amplituhedra::RationalMatrix;
use clap::Arg;
use serde_json::json;

use super::{count_arg, file_arg, seed_arg, trials_arg, Command, Context};
use crate::error::CliError;
use crate::report::Report;

pub struct CheckTnn;

impl Command for CheckTnn {
    fn name(&self) -> &'static str {
        "check-tnn"
    }

    fn about(&self) -> &'static str {
        "Check that every maximal minor of a matrix is nonnegative"
    }

    fn args(&self) -> Vec<Arg> {
        vec![file_arg("matrix", "Matrix JSON file")]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let m: RationalMatrix = ctx.read("matrix")?;
        let tnn = check_tnn(&m).map_err(CliError::usage)?;
        let mut report = ctx
            .report(self.name())
            .verdict("isTnn", tnn.is_tnn)
            .counter("minors", binomial(m.cols(), m.rows()) as u64);
        if let Some((cols, value)) = &tnn.first_violation {
            report = report.message(format!("minor {cols} = {value}"));
        } else if !tnn.rank_ok {
            report = report.message("rank below row count");
        }
        report.emit(ctx.out(), "tnn-report.json", &tnn)
    }
}

pub struct CellMember;

impl Command for CellMember {
    fn name(&self) -> &'static str {
        "cell-member"
    }

    fn about(&self) -> &'static str {
        "Check membership of a matrix in a closed positroid cell"
    }

    fn args(&self) -> Vec<Arg> {
        vec![file_arg("matrix", "Matrix JSON file"), file_arg("cell", "Positroid cell JSON file")]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let m: RationalMatrix = ctx.read("matrix")?;
        let cell: PositroidCellSpec = ctx.read("cell")?;
        let member = in_closed_cell(&m, &cell).map_err(CliError::usage)?;
        ctx.report(self.name())
            .verdict("inClosedCell", member)
            .counter("nonbases", cell.nonbases().len() as u64)
            .emit(ctx.out(), "membership.json", &json!({ "inClosedCell": member, "cell": cell }))
    }
}

pub struct Sample;

impl Command for Sample {
    fn name(&self) -> &'static str {
        "sample"
    }

    fn about(&self) -> &'static str {
        "Draw seeded totally positive points of the top cell"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            count_arg("k", true, "Rows"),
            count_arg("n", true, "Columns"),
            seed_arg(),
            trials_arg("1"),
        ]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let k: usize = ctx.param("k");
        let n: usize = ctx.param("n");
        let seed: u64 = ctx.param("seed");
        let trials: u64 = ctx.param("trials");
        if k == 0 || k > n {
            return Err(CliError::usage(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let points: Vec<RationalMatrix> =
            (0..trials).map(|i| random_tnn_point(&mut trial_rng(seed, i), k, n).into_matrix()).collect();
        let positive = points.iter().all(|p| check_totally_positive(p).unwrap_or(false));
        ctx.report(self.name())
            .verdict("totallyPositive", positive)
            .counter("samples", trials)
            .emit(ctx.out(), "samples.json", &points)
    }
}
