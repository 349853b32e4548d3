//! Command-line driver: json problem specs in, reports out.

pub mod error;
pub mod report;
pub mod run;
pub mod spec;

pub use error::CliError;
pub use report::{emit, Format, Report};
pub use run::{run, Command, RunOptions};
pub use spec::ProblemSpec;
