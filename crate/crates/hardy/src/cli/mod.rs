//! The `hardy` command line: one job per invocation, configured by a TOML
//! file plus `--override key=value` flags, producing a JSON report and CSV
//! samples in the output directory.

pub mod config;
pub mod emit;
mod modes;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::certify::Verdict;
use crate::error::Error;

pub use config::JobConfig;
pub use emit::{emit_report, envelope, to_json_string, validate_report, write_csv, Table, SCHEMA};
pub use modes::{run_job, JobOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(name = "verify-1d")]
    Verify1d,
    EpFamily,
    AFamily,
    Series,
    NdExample,
    Rellich,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Verify1d,
        Mode::EpFamily,
        Mode::AFamily,
        Mode::Series,
        Mode::NdExample,
        Mode::Rellich,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Verify1d => "verify-1d",
            Mode::EpFamily => "ep-family",
            Mode::AFamily => "a-family",
            Mode::Series => "series",
            Mode::NdExample => "nd-example",
            Mode::Rellich => "rellich",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Outcome of a job; decides the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    NotOptimal,
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub const ALL: [Status; 5] = [
        Status::Optimal,
        Status::NotOptimal,
        Status::Pass,
        Status::Fail,
        Status::Inconclusive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::NotOptimal => "not-optimal",
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_name(s: &str) -> Option<Status> {
        Status::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Optimal | Status::Pass => 0,
            Status::NotOptimal | Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }

    /// A critical weight whose ground state looks square integrable is not
    /// optimal, so it shares the not-optimal code.
    pub fn from_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Optimal => Status::Optimal,
            Verdict::NotCritical | Verdict::CriticalButPositiveCriticalSuspected => Status::NotOptimal,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }

    /// The worse of two outcomes: failure beats inconclusive beats success.
    pub fn and(self, other: Status) -> Status {
        let rank = |s: Status| match s.exit_code() {
            0 => 0,
            3 => 1,
            _ => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// Exit code for a failed job.
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Construct and certify optimal Hardy weights")]
pub struct Args {
    pub mode: Mode,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomized test functions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `key.path=value`, applied after the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Loads the config, runs the job and writes `report.json` plus CSV files to
/// `out`. Returns the exit code.
pub fn run(args: &Args) -> Result<i32, Error> {
    let cfg = JobConfig::from_path(&args.config, &args.overrides)?;
    let out = run_job(args.mode, &cfg, args.seed)?;
    write_outputs(&out, &args.out)?;
    Ok(out.status.exit_code())
}

pub fn write_outputs(out: &JobOutput, dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    emit_report(&out.report, &dir.join("report.json"))?;
    for t in &out.tables {
        write_csv(t, dir)?;
    }
    Ok(())
}

/// Entry point of the binary: parses `argv`, sets up logging from
/// `HARDY_LOG` and maps errors to exit code 1.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("HARDY_LOG", "warn"))
        .format_timestamp(None)
        .try_init();
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hardy: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(Mode::from_name(m.name()), Some(m));
            assert_eq!(Mode::from_str(m.name(), false).ok(), Some(m));
        }
        for s in Status::ALL {
            assert_eq!(Status::from_name(s.name()), Some(s));
        }
    }

    #[test]
    fn combining_keeps_the_worst() {
        assert_eq!(Status::Pass.and(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::Inconclusive.and(Status::Fail), Status::Fail);
        assert_eq!(Status::Optimal.and(Status::Pass), Status::Optimal);
    }
}
