//! Library half of the `episodes` command-line tool. The subcommand
//! implementations and the measurement harness live here so integration
//! tests (and the acceptance suite) can drive them directly.

pub mod args;
pub mod bench;
pub mod commands;
