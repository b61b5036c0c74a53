//! Property suites over bounded universes of instances, with reports whose
//! failures carry replayable witnesses.

pub mod engine;
pub mod properties;
pub mod report;
pub mod suites;
pub mod witness;

pub use engine::Engine;
pub use report::{PropertyTally, Status, VerificationReport, Witness};
pub use suites::{run_all, run_suite, SuiteConfig, SUITES};
pub use witness::replay;
