//! Experiment and ingest layer over the core model: dataset parsers,
//! scenario files, the sweep runner, and the policy comparison report.

pub mod experiment;
pub mod files;
pub mod ingest;
