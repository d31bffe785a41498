use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;

use ptpm_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        2 => LevelFilter::Debug,
        _ => LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let stdout = std::io::stdout();
    let outcome = panic::catch_unwind(|| {
        let mut out = stdout.lock();
        let result = execute(&cli.command, &mut out);
        out.flush().ok();
        result
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("ptpm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        // the panic hook already printed the message
        Err(_) => ExitCode::from(1),
    }
}
