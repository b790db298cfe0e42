use amplituhedra::amplituhedron::AmplituhedronSetup;
use amplituhedra::equivalence::{construct_equivalence, equivalence_transport_check, EquivalenceError};
use amplituhedra::sampling::{random_tnn_point, trial_rng};
use clap::Arg;

use super::{file_arg, seed_arg, trials_arg, Command, Context};
use crate::error::CliError;
use crate::report::Report;

pub struct Equivalence;

impl Command for Equivalence {
    fn name(&self) -> &'static str {
        "equivalence"
    }

    fn about(&self) -> &'static str {
        "Certify Z' = C·Z·D between two positive setups and spot-check transport"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            file_arg("source", "Setup JSON for Z"),
            file_arg("target", "Setup JSON for Z'"),
            seed_arg(),
            trials_arg("100"),
        ]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let a: AmplituhedronSetup = ctx.read("source")?;
        let b: AmplituhedronSetup = ctx.read("target")?;
        let seed: u64 = ctx.param("seed");
        let trials: u64 = ctx.param("trials");
        let cert = match construct_equivalence(&a, &b) {
            Ok(c) => c,
            Err(e @ EquivalenceError::Precondition(_)) => {
                return Ok(ctx.report(self.name()).verdict("preconditionsHold", false).message(e.to_string()));
            }
            Err(e) if e.is_internal_consistency() => return Err(CliError::Internal(e.to_string())),
            Err(e) => return Err(CliError::usage(e)),
        };
        let mut passed = 0;
        for i in 0..trials {
            let v = random_tnn_point(&mut trial_rng(seed, i), a.k(), a.n());
            if equivalence_transport_check(&cert, &v).map_err(CliError::usage)? {
                passed += 1;
            }
        }
        ctx.report(self.name())
            .verdict("certificateValid", cert.is_valid())
            .verdict("transportHolds", passed == trials)
            .counter("transportChecks", trials)
            .counter("transportPassed", passed)
            .emit(ctx.out(), "certificate.json", &cert)
    }
}
