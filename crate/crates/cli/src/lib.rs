//! Command-line front end: ingest, decompose, solve, statistics, DOT export,
//! synthetic data and the game server.

pub mod commands;
pub mod manifest;
pub mod server;

pub use commands::{run, Cli};
