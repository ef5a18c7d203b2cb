//! Library side of the `pamix` binary, so pipelines can also be driven
//! in-process.

pub mod cli;
mod commands;
mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use cli::{Cli, Command};
use manifest::RunManifest;

/// Exit 1 for invalid input or a failed computation, 2 for I/O trouble.
#[derive(Debug)]
pub enum Failure {
    Core(pamix::Error),
    Io(std::io::Error),
    Invalid(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 2,
            Failure::Core(e) if e.is_io() => 2,
            _ => 1,
        }
    }

    pub fn from_json(e: serde_json::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.into())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl From<pamix::Error> for Failure {
    fn from(e: pamix::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// What a subcommand reports back for the manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rng_seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<String>,
}

fn execute(mut command: Command) -> Result<(), Failure> {
    if let Command::Rerun(args) = command {
        let recorded = RunManifest::read(&args.manifest)?;
        let mut replay = recorded.run;
        if let (Some(dir), Some(slot)) = (args.out_dir, replay.out_dir_mut()) {
            *slot = dir;
        }
        eprintln!("rerunning `{}` from {}", replay.name(), args.manifest.display());
        return execute(replay);
    }

    let start = Instant::now();
    let out_dir = command.out_dir_mut().expect("every other subcommand has an output directory").clone();
    std::fs::create_dir_all(&out_dir)?;
    let outcome = match &mut command {
        Command::Simulate(a) => commands::simulate::run(a)?,
        Command::Estimate(a) => commands::estimate::run(a)?,
        Command::Dist(a) => commands::dist::run(a)?,
        Command::Cite(a) => commands::cite::run(a)?,
        Command::Rerun(_) => unreachable!(),
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        run: command,
        rng_seed: outcome.rng_seed,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        duration_secs: start.elapsed().as_secs_f64(),
    };
    manifest.write(&out_dir)?;
    eprintln!("wrote {}", out_dir.join(manifest::FILE_NAME).display());
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 1;
        }
    }
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
