//! Command-line front end: configuration, the subcommands, and exit-status
//! mapping.

use std::io::Write;

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_baby, cmd_expansion, cmd_profile, cmd_sweep, cmd_verify, Outcome, SweepRow};
pub use config::{Format, Overrides, RunConfig};
pub use error::{CliError, ErrorRecord};

/// Print the outcome and return the process exit status.
pub fn finish(result: Result<Outcome, CliError>) -> i32 {
    let result = result.and_then(|o| {
        // a closed stdout is not an error of the computation
        let _ = writeln!(std::io::stdout().lock(), "{}", o.stdout);
        if o.failed_gates.is_empty() {
            Ok(())
        } else {
            Err(CliError::GatesFailed(o.failed_gates))
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let rec = e.record();
            eprintln!("{}", serde_json::to_string(&rec).expect("error record serializes"));
            rec.exit_code
        }
    }
}
