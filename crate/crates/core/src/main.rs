use std::process::ExitCode;

use qrke_lab::harness::{parse_cli, run_experiment, Parsed};
use qrke_lab::Error;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let spec = match parse_cli(std::env::args().skip(1)) {
        Ok(Parsed::Run(spec)) => spec,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    match run_experiment(&spec) {
        Ok(report) => {
            print!("{}", spec.render(&report));
            ExitCode::from(report.outcome().exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
