//! Body generators and experiment suites.

pub mod gen;
pub mod suite;

pub use gen::{gen_body, GenKind, GenSpec, NamedBody};
pub use suite::{body_digest, run_suite, write_csv, ExperimentReport, KRecord, SuiteConfig, SuiteKind, Verdict};
