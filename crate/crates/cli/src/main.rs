mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;
use sparsegnn::Error;

use args::{Cli, Command, Precision};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::KernelMismatch { .. } | Error::Tape(_) | Error::Dispatch(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

macro_rules! by_precision {
    ($precision:expr, $f:ident($($arg:expr),*)) => {
        match $precision {
            Precision::F32 => $f::<f32>($($arg),*),
            Precision::F64 => $f::<f64>($($arg),*),
        }
    };
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let threads = input::resolve_threads(cli.threads)?;
    match &cli.command {
        Command::Tune(args) => {
            use commands::tune::run;
            by_precision!(cli.precision, run(args, threads))?;
        }
        Command::Bench(args) => {
            use commands::bench::run;
            by_precision!(cli.precision, run(args, threads))?;
        }
        Command::Train(args) => {
            use commands::train::run;
            by_precision!(cli.precision, run(args, threads))?;
        }
        Command::Verify(args) => {
            if !commands::verify::run(args, threads)? {
                return Ok(ExitCode::from(EXIT_VERIFY_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
