//! Batch front end for the coupled fixed-point solver: JSON problem specs in,
//! CSV traces and JSON reports out.

pub mod expr;
pub mod run;
pub mod spec;

pub use run::{run, RunArtifacts, RunError, RunOptions, RunResult};
pub use spec::{parse_spec, ProblemSpec, SpecError};
