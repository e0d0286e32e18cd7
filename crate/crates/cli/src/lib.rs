//! The `hyperell` command-line front end.
//!
//! Exit status: 0 success, 1 usage or runtime error, 2 verification failure,
//! 3 refused oversize scan.

pub mod commands;
pub mod config;
pub mod report;

use std::io::Write;

use commands::{execute, Failure};
use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// Runs one invocation; `args` excludes the program name.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::parse(args) {
        Ok(c) => c,
        Err(e) if e.informational => {
            let _ = out.write_all(e.message.as_bytes());
            return EXIT_OK;
        }
        Err(e) => {
            let _ = err.write_all(e.message.as_bytes());
            return EXIT_USAGE;
        }
    };
    run_config(&cfg, out, err)
}

/// Runs a parsed configuration inside a pool of `cfg.threads` workers.
pub fn run_config(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(cfg)) {
        Ok(outcome) => {
            for n in &outcome.notices {
                let _ = writeln!(err, "notice: {n}");
            }
            if let Err(e) = outcome.report.emit(cfg.format, out) {
                let _ = writeln!(err, "error: writing report: {e}");
                return EXIT_USAGE;
            }
            if outcome.verified {
                EXIT_OK
            } else {
                let _ = writeln!(err, "verification failed");
                EXIT_VERIFY
            }
        }
        Err(Failure::Refused(msg)) => {
            let _ = writeln!(err, "refused: {msg}");
            EXIT_REFUSED
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
