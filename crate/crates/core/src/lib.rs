//! Fairness compliance checking: a small policy language, group fairness
//! metrics, decision rules under uncertainty and report generation.

pub mod decision;
pub mod fairness;
pub mod ingest;
pub mod interval;
pub mod pipeline;
pub mod policy;
pub mod report;
#[cfg(any(test, feature = "testing"))]
pub mod testing;
