//! Scenario files, seeded generation, the curated gallery and the runner
//! behind the `polydisc` command.

pub mod gallery;
pub mod generate;
pub mod run;
pub mod scenario;
