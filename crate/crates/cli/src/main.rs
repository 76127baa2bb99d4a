//! `qbessel` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error or unreadable
//! input, 3 numeric failure.

mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run::execute(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout
                .write_all(out.text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                log::error!("cannot write output: {e}");
                return ExitCode::from(3);
            }
            if out.verified {
                ExitCode::SUCCESS
            } else {
                log::error!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
