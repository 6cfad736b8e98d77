//! IO, configuration, trial simulator, study harness, and CLI plumbing for
//! the multi-arm longitudinal rank-sum test.

pub mod bench;
pub mod cli;
pub mod io;
pub mod report;
pub mod schema;
pub mod simulator;
pub mod study;
