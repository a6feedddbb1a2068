//! Library side of the `hardy` binary: configuration, commands and output.

pub mod commands;
pub mod config;
pub mod output;
pub mod suite;
