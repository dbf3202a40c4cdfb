//! Benchmark and verification harness for `cram-core`.

pub mod corpus;
pub mod harness;
