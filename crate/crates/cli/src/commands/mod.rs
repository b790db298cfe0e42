//! Subcommand registry.

mod campaign;
mod equivalence;
mod geometry;
mod report;
mod tnn;
mod z0;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{value_parser, Arg, ArgAction, ArgMatches};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;
use crate::report::{InputDigest, Report};

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn args(&self) -> Vec<Arg>;
    fn run(&self, ctx: &mut Context) -> Result<Report, CliError>;
}

pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn empty() -> Self {
        CommandRegistry { commands: BTreeMap::new() }
    }

    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.insert(command.name(), command);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.get(name).map(|c| c.as_ref())
    }

    pub fn clap(&self) -> clap::Command {
        let root = clap::Command::new("amp")
            .about("Exact verification of totally nonnegative Grassmannians and amplituhedra")
            .version(env!("CARGO_PKG_VERSION"))
            .subcommand_required(true)
            .arg_required_else_help(true);
        self.commands.values().fold(root, |root, c| {
            root.subcommand(
                clap::Command::new(c.name())
                    .about(c.about())
                    .args(c.args())
                    .arg(out_arg()),
            )
        })
    }
}

impl Default for CommandRegistry {
    fn default() -> Self {
        let mut r = CommandRegistry::empty();
        r.register(Box::new(tnn::CheckTnn));
        r.register(Box::new(tnn::CellMember));
        r.register(Box::new(tnn::Sample));
        r.register(Box::new(geometry::Map));
        r.register(Box::new(geometry::Embed));
        r.register(Box::new(campaign::FiberCheck));
        r.register(Box::new(campaign::FiberCampaign));
        r.register(Box::new(z0::Z0));
        r.register(Box::new(equivalence::Equivalence));
        r.register(Box::new(report::Aggregate));
        r
    }
}

/// Parsed arguments plus the running input digest.
pub struct Context<'a> {
    pub args: &'a ArgMatches,
    pub digest: InputDigest,
}

impl<'a> Context<'a> {
    pub fn new(args: &'a ArgMatches) -> Self {
        Context { args, digest: InputDigest::default() }
    }

    pub fn out(&self) -> Option<&Path> {
        self.args.get_one::<PathBuf>("out").map(PathBuf::as_path)
    }

    pub fn path(&self, name: &str) -> &Path {
        self.args.get_one::<PathBuf>(name).expect("required by clap")
    }

    pub fn read<T: DeserializeOwned>(&mut self, name: &str) -> Result<T, CliError> {
        let path = self.path(name).to_path_buf();
        read_json(&path, &mut self.digest)
    }

    pub fn value<T: Clone + Send + Sync + 'static>(&self, name: &str) -> T {
        self.args.get_one::<T>(name).cloned().expect("defaulted or required by clap")
    }

    pub fn param<T: Clone + Send + Sync + Serialize + 'static>(&mut self, name: &str) -> T {
        let v = self.value::<T>(name);
        self.digest.add_json(name, &v);
        v
    }

    pub fn report(&mut self, command: &str) -> Report {
        let digest = std::mem::take(&mut self.digest);
        Report::new(command, digest.finish())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path, digest: &mut InputDigest) -> Result<T, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    digest.add(&path.display().to_string(), &bytes);
    serde_json::from_slice(&bytes).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn out_arg() -> Arg {
    Arg::new("out")
        .long("out")
        .value_name("DIR")
        .value_parser(value_parser!(PathBuf))
        .help("Write artifacts and report.json into DIR")
}

pub fn file_arg(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).required(true).value_parser(value_parser!(PathBuf)).help(help)
}

pub fn seed_arg() -> Arg {
    Arg::new("seed").long("seed").value_parser(value_parser!(u64)).default_value("0").help("Campaign seed")
}

pub fn trials_arg(default: &'static str) -> Arg {
    Arg::new("trials")
        .long("trials")
        .value_parser(value_parser!(u64).range(1..))
        .default_value(default)
        .help("Number of trials")
}

pub fn count_arg(name: &'static str, required: bool, help: &'static str) -> Arg {
    let arg = Arg::new(name).long(name).value_parser(value_parser!(usize)).help(help);
    if required {
        arg.required(true)
    } else {
        arg
    }
}

pub fn flag(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).action(ArgAction::SetTrue).help(help)
}
