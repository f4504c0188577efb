//! Scenario files, reports and the `run`/`verify`/`oracle` commands.

pub mod build;
pub mod report;
pub mod run;
pub mod scenario;
pub mod verify;
