use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;
use stochastic_knapsack_cli::{execute, output_dir, write_report, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::Usage(e.to_string())),
    };
    match execute(&cli).and_then(|r| write_report(&output_dir(&cli), &r)) {
        Ok(written) => {
            println!("{}", serde_json::to_string(&written).expect("paths serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.exit_code())
}
