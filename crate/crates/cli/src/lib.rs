//! The `posdef` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

mod app;

pub use app::{run, Outcome};
