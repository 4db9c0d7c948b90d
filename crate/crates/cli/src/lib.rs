//! Experiment driver for `gatetrain`. Each subcommand lives in
//! [`commands`]; CSV layouts are in [`output`].

pub mod args;
pub mod commands;
pub mod datasets;
pub mod output;
pub mod runner;
pub mod svg;

use std::fmt;

pub use args::Cli;

/// Flag combination that parsed but makes no sense (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A numerical check failed (exit code 4).
#[derive(Debug)]
pub struct NumericFailure(pub String);

impl fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericFailure {}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    use gatetrain_core::Error as CoreError;
    for cause in err.chain() {
        if cause.is::<NumericFailure>() {
            return EXIT_NUMERIC;
        }
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::Io { .. } | CoreError::Parse { .. } => EXIT_IO,
                CoreError::Config(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_FAILURE
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    use args::Command;
    match cli.command {
        Command::Train(a) => commands::train::run(&a),
        Command::SweepLr(a) => commands::sweep::run(&a),
        Command::Scaling(a) => commands::scaling::run(&a),
        Command::Blur(a) => commands::blur::run(&a),
        Command::Incremental(a) => commands::incremental::run(&a),
        Command::Viz2d(a) => commands::viz2d::run(&a),
        Command::Gradcheck(a) => commands::gradcheck::run(&a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let io = anyhow::Error::new(gatetrain_core::Error::Io {
            path: PathBuf::from("x"),
            source: std::io::Error::from(std::io::ErrorKind::NotFound),
        })
        .context("loading");
        assert_eq!(exit_code(&io), EXIT_IO);
        let cfg = anyhow::Error::new(gatetrain_core::Error::Config("lr".into()));
        assert_eq!(exit_code(&cfg), EXIT_USAGE);
        assert_eq!(exit_code(&anyhow::Error::new(NumericFailure("grad".into()))), EXIT_NUMERIC);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), EXIT_FAILURE);
    }
}
