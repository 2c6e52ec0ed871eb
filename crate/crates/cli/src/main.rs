//! Command-line front end. Exit codes: 0 when every asserted check passes,
//! 1 when a check fails, 2 on configuration or hypothesis errors.

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

/// A configuration error raised by the front end itself.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(e: &anyhow::Error) -> u8 {
    use semistable::Error as E;
    if e.downcast_ref::<Usage>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(
            E::Hypothesis(_)
            | E::InvalidDimension(_)
            | E::InvalidGrid(_)
            | E::InvalidArgument(_)
            | E::Io(_)
            | E::Csv(_)
            | E::Json(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
