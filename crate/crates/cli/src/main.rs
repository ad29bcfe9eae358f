use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use nonunital_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = cli.resolve().and_then(|config| run(&config).map(|table| (config, table)));
    match result {
        Ok((config, table)) => {
            eprintln!("wrote {} rows to {}", table.rows.len(), config.output_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
