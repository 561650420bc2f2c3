use std::process::ExitCode;

use biexciton::cli::{error_json, run, Cli};
use biexciton::Error;
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::InvalidArgument(e.kind().to_string());
            eprintln!("{}", error_json(&err));
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(&cli.verb) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}
