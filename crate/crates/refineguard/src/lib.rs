//! Test generation, fixtures, benchmarking and reporting on top of
//! `refineguard-core`.

pub mod autotest;
pub mod bench;
pub mod cli;
pub mod demo;
pub mod fixtures;
pub mod manifest;
pub mod report;

pub use refineguard_core as core;
