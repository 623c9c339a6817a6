//! Command-line front end for `fkr`: file formats, subcommands and the
//! comparison pipeline.

pub mod commands;
pub mod pipeline;
