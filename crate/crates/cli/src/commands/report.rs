use std::path::PathBuf;

use clap::{value_parser, Arg};

use super::{read_json, Command, Context};
use crate::error::CliError;
use crate::report::Report;

/// Folds several report files into one.
pub struct Aggregate;

impl Command for Aggregate {
    fn name(&self) -> &'static str {
        "report"
    }

    fn about(&self) -> &'static str {
        "Aggregate report files; one verdict per input report"
    }

    fn args(&self) -> Vec<Arg> {
        vec![Arg::new("reports")
            .value_name("REPORT")
            .required(true)
            .num_args(1..)
            .value_parser(value_parser!(PathBuf))
            .help("Report JSON files")]
    }

    fn run(&self, ctx: &mut Context) -> Result<Report, CliError> {
        let paths: Vec<PathBuf> = ctx.args.get_many::<PathBuf>("reports").expect("required").cloned().collect();
        let mut inputs = Vec::new();
        for path in &paths {
            inputs.push((path.display().to_string(), read_json::<Report>(path, &mut ctx.digest)?));
        }
        let mut out = ctx.report(self.name());
        for (path, r) in inputs {
            out = out.verdict(&format!("{}:{path}", r.command), r.all_true());
            for (name, value) in r.counters {
                *out.counters.entry(format!("{}.{name}", r.command)).or_insert(0) += value;
            }
            out.artifacts.extend(r.artifacts);
        }
        let failing = out.verdicts.iter().filter(|v| !v.value).count() as u64;
        out.counters.insert("reports".into(), paths.len() as u64);
        out.counters.insert("failingReports".into(), failing);
        Ok(out)
    }
}
