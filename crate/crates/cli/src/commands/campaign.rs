use std::path::PathBuf;

use amplituhedra::amplituhedron::AmplituhedronSetup;
use amplituhedra::campaign::{run_fiber_campaign, CampaignConfig, CampaignError};
use amplituhedra::fiber::{convexity_certificate, FiberError};
use amplituhedra::tnn::PositroidCellSpec;
use amplituhedra::{Rational, RationalMatrix};
use clap::{value_parser, Arg};
use log::info;

use super::{count_arg, file_arg, flag, read_json, seed_arg, trials_arg, Command, Context};
use crate::error::CliError;
use crate::report::Report;

pub struct FiberCheck;

impl Command for FiberCheck {
    fn name(&self) -> &'static str {
        "fiber-check"
    }

    fn about(&self) -> &'static str {
        "Certify that the segment between two same-fiber points stays in a closed cell"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            file_arg("setup", "Setup JSON file"),
            file_arg("u", "First point (matrix JSON)"),
            file_arg("v", "Second point (matrix JSON)"),
            Arg::new("cell")
                .long("cell")
                .value_parser(value_parser!(PathBuf))
                .help("Positroid cell JSON file (default: top cell)"),
        ]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let setup: AmplituhedronSetup = ctx.read("setup")?;
        let u: RationalMatrix = ctx.read("u")?;
        let v: RationalMatrix = ctx.read("v")?;
        let cell = match ctx.args.get_one::<PathBuf>("cell").cloned() {
            Some(path) => read_json::<PositroidCellSpec>(&path, &mut ctx.digest)?,
            None => PositroidCellSpec::top(setup.k(), setup.n()),
        };
        let report = ctx.report(self.name());
        match convexity_certificate(&setup, &cell, &u, &v) {
            Ok(cert) => report
                .verdict("segmentInClosedCell", cert.verdict)
                .counter("minors", cert.minors.len() as u64)
                .emit(ctx.out(), "certificate.json", &cert),
            Err(e @ (FiberError::FiberMismatch(_) | FiberError::NotInCell(_) | FiberError::NotInFiber(_))) => {
                Ok(report.verdict("preconditionsHold", false).message(e.to_string()))
            }
            Err(e) if e.is_internal_consistency() => Err(CliError::Internal(e.to_string())),
            Err(e) => Err(CliError::usage(e)),
        }
    }
}

pub struct FiberCampaign;

impl Command for FiberCampaign {
    fn name(&self) -> &'static str {
        "fiber-campaign"
    }

    fn about(&self) -> &'static str {
        "Seeded same-fiber pairs with convexity certificates on a Vandermonde setup"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            count_arg("k", true, "Rows of the points"),
            count_arg("m", true, "Codimension parameter"),
            count_arg("n", false, "Columns; must equal k+m+1"),
            seed_arg(),
            trials_arg("100"),
            Arg::new("precision")
                .long("precision")
                .value_parser(value_parser!(u32))
                .default_value("8")
                .help("Decimal digits recorded in the config"),
            Arg::new("node-lo")
                .long("node-lo")
                .value_parser(value_parser!(Rational))
                .default_value("1")
                .help("Lower end of the Vandermonde node range"),
            Arg::new("node-hi")
                .long("node-hi")
                .value_parser(value_parser!(Rational))
                .default_value("10")
                .help("Upper end of the Vandermonde node range"),
            flag("trivial", "Certify each U against itself"),
        ]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let k: usize = ctx.value("k");
        let m: usize = ctx.value("m");
        let config = CampaignConfig {
            seed: ctx.value("seed"),
            trials: ctx.value("trials"),
            k,
            m,
            n: ctx.args.get_one::<usize>("n").copied().unwrap_or(k + m + 1),
            node_range: (ctx.value("node-lo"), ctx.value("node-hi")),
            precision_digits: ctx.value("precision"),
            force_trivial: ctx.args.get_flag("trivial"),
        };
        ctx.digest.add_json("config", &config);
        info!("fiber campaign: k={k} m={m} trials={}", config.trials);
        let result = match run_fiber_campaign(&config) {
            Ok(r) => r,
            Err(e) if e.is_internal_consistency() => return Err(CliError::Internal(e.to_string())),
            Err(e @ (CampaignError::Config(_) | CampaignError::Setup(_))) => return Err(CliError::usage(e)),
            Err(e) => {
                return Ok(ctx.report(self.name()).verdict("trialsCompleted", false).message(e.to_string()));
            }
        };
        let out = ctx.out().map(|p| p.to_path_buf());
        let report = ctx
            .report(self.name())
            .verdict("allCertificatesTrue", result.all_true())
            .counter("trials", config.trials)
            .counter("accepted", result.accepted() as u64)
            .counter("rejectedSamples", result.rejected_samples() as u64)
            .counter("trivialPairs", result.trivial_pairs() as u64);
        match out {
            Some(dir) => report
                .emit(Some(&dir), "config.json", &result.config)?
                .emit(Some(&dir), "setup.json", &result.setup)?
                .emit(Some(&dir), "certificates.json", &result.outcomes),
            None => report.emit(None, "campaign.json", &result),
        }
    }
}
