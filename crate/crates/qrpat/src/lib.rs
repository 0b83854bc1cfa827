//! File formats, threaded sweeps and the command-line driver around
//! `qrpat-core`.

pub mod cache;
pub mod cli;
pub mod config;
pub mod export;
pub mod expr;
pub mod parallel;
