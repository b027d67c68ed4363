use std::process::ExitCode;

use clap::Parser;
use rabi_heun::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
