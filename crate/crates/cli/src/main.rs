mod commands;
mod error;
mod report;

use std::io::Write;
use std::process::ExitCode;

use commands::{CommandRegistry, Context};
use error::CliError;
use report::{write_json, Report};

fn run(registry: &CommandRegistry) -> Result<Report, CliError> {
    let matches = registry.clap().get_matches();
    let (name, args) = matches.subcommand().expect("subcommand required");
    let command = registry.get(name).expect("registered subcommand");
    let mut ctx = Context::new(args);
    let mut report = command.run(&mut ctx)?;
    if let Some(dir) = ctx.out() {
        let path = dir.join("report.json");
        report.artifacts.push(path.display().to_string());
        write_json(dir, "report.json", &report)?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AMP_LOG", "warn")).init();
    let registry = CommandRegistry::default();
    match run(&registry) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            // a closed pipe on stdout is not an error of the command
            let _ = writeln!(std::io::stdout(), "{text}");
            eprintln!("{}", report.summary());
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
