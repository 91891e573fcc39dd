//! File-driven verification runner and the builtin example catalog.

pub mod catalog;
pub mod problem;
pub mod run;

pub use catalog::{catalog, fixture, Fixture};
pub use problem::{format_problem, parse_problem, ProblemFile};
pub use run::{run_tasks, RunReport, TaskOutcome, TaskVerdict};
