use std::process::ExitCode;

use clap::Parser;
use coopnet::cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match coopnet::execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coopnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
