//! Batch front end for celeste: reads a scenario file, runs one command and
//! renders the result as plain text.

pub mod error;
pub mod run;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use run::{run_scenario, run_text, Options, Outcome, EXIT_ERROR, EXIT_FAIL, EXIT_OK};
pub use scenario::{Command, FanSpec, Prepared, Scenario};
